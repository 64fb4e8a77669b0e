use texrig_core::rig::fault;
use texrig_core::validate::check_gradients;

#[test]
fn covariance_pullback_sign_flip_is_caught() {
    fault::set_cov_pullback_sign_flip(true);
    let broken = check_gradients(2, 99);
    fault::set_cov_pullback_sign_flip(false);
    assert!(!broken.passed, "{}", broken.line());
    let fixed = check_gradients(2, 99);
    assert!(fixed.passed, "{}", fixed.line());
}
