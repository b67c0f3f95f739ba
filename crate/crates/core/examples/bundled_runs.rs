//! Solves the imaginary-axis and near-Stokes configurations and prints a summary.

use std::time::Instant;

use tritronquee::{newton_solve, DomainLayout, LineSpec, Side, SolverConfig};

fn main() -> Result<(), tritronquee::Error> {
    let runs = [
        ("imaginary axis", LineSpec::imaginary_axis(), DomainLayout::three_domain(-10.0, 10.0, 20, 256, 20)?),
        ("near Stokes", LineSpec::near_stokes(), DomainLayout::three_domain(-10.0, 10.0, 20, 256, 256)?),
    ];
    for (name, line, layout) in runs {
        let t = Instant::now();
        let (state, report) = newton_solve(&line, &layout, &SolverConfig::default())?;
        println!("== {name} ({:.2?})", t.elapsed());
        println!("converged {} after {} iterations, halvings {}", report.converged, report.iterations, report.damping_halvings);
        println!("residuals {:?}", report.residual_history.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>());
        println!("cond {:.3e}, refined ODE residual {:.3e}", report.jacobian_condition, report.refined_ode_residual);
        for j in &report.junctions {
            println!("junction x={} value {:.2e} deriv {:.2e}", j.x, j.value_mismatch, j.deriv_mismatch);
        }
        for s in &report.coeff_spectra {
            let a = s.coeffs.abs();
            let max = a.iter().copied().fold(0.0, f64::max);
            println!(
                "domain {:>3}: max {:.3e}, floor {:.3e}, saturation {}, first rel<1e-12 {:?}",
                s.label,
                max,
                s.diagnostic.floor,
                s.diagnostic.saturation_index,
                (0..a.len()).find(|&m| a[m..].iter().all(|&c| c <= 1e-12 * max))
            );
        }
        for side in [Side::Left, Side::Right] {
            let vmax = state.end_values(side).iter().map(|v| v.norm()).fold(0.0, f64::max);
            println!("max |v| {side:?}: {vmax:.3e}");
        }
        for x in [-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0] {
            let (w, dw) = state.evaluate(x)?;
            println!("x={x:>6}: Omega = {w:.12}, dOmega/dx = {dw:.6}");
        }
    }
    Ok(())
}
