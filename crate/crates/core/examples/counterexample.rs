//! Two different structures whose spectra coincide when `c = -a b`.

use gemd::harness::builtins::{sec3_triangle, sec3_twin};
use gemd::harness::counterexample::{psd_deviation, verify_counterexample};

fn main() -> gemd::error::Result<()> {
    let r = verify_counterexample(256, 20, 0, 0.3, 0.9)?;
    println!("max deviation {:.2e}, closed-form error {:.2e}, pass {}", r.max_deviation, r.max_closed_form_error, r.pass);

    let (a, b) = (0.5, 0.7);
    for c in [-a * b, -a * b + 0.05] {
        let d = psd_deviation(&sec3_triangle(a, b, c)?, &sec3_twin(a, b)?, 128)?;
        println!("c = {c:+.3}: deviation {d:.3e}");
    }
    Ok(())
}
