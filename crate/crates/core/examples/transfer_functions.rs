//! Rational transfer functions in the delay operator.

use gemd::lti::TransferFunction;

fn main() -> gemd::error::Result<()> {
    // (1 + 0.5 z^-1) / (1 - 0.8 z^-1)
    let h = TransferFunction::new([1.0, 0.5], [1.0, -0.8])?;
    println!("feedthrough gain  {}", h.feedthrough_gain());
    println!("strictly causal   {}", h.is_strictly_causal());
    println!("stable            {}", h.is_stable());
    println!("minimum phase     {}", h.is_minimum_phase());
    println!("poles             {:?}", h.poles());
    println!("impulse response  {:?}", h.impulse_response(6));
    println!("H(e^{{i pi/3}})      {}", h.evaluate(std::f64::consts::FRAC_PI_3)?);

    let delayed = h.strictly_causal_part();
    println!("strictly causal part impulse response {:?}", delayed.impulse_response(4));

    let inv = h.inverse()?;
    println!("H * H^-1 impulse response {:?}", h.mul(&inv).impulse_response(4));
    Ok(())
}
