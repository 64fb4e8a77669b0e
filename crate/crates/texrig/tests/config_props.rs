use std::path::{Path, PathBuf};

use proptest::prelude::*;
use texrig::config::RunConfig;
use texrig_core::mesh::FrameVariant;
use texrig_core::rig::LiftVariant;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0f64..1e6, 1e-12f64..1e-3]
}

prop_compose! {
    fn configs()(
        uv in (1usize..2048, 1usize..2048, 0usize..6),
        naive in any::<bool>(),
        scaled in any::<bool>(),
        weights in proptest::array::uniform4(finite()),
        eps in (proptest::option::of(finite()), proptest::option::of(finite())),
        lr in proptest::array::uniform5(0.0f64..1.0),
        iterations in 0usize..100_000,
        init in (finite(), -10.0f64..10.0, finite()),
        betas in (0.0f64..0.999, 0.0f64..0.999),
        paths in proptest::collection::vec("[a-z]{1,8}\\.obj", 0..4),
        seed in any::<u64>(),
    ) -> RunConfig {
        RunConfig {
            uv_width: uv.0,
            uv_height: uv.1,
            dilation_rings: uv.2,
            variant: if naive { LiftVariant::Naive } else { LiftVariant::QuasiPhong },
            frame_variant: if scaled { FrameVariant::ScaledRotation } else { FrameVariant::FullJacobian },
            lambda_l1: weights[0],
            lambda_ssim: weights[1],
            lambda_reg_mu: weights[2],
            lambda_reg_s: weights[3],
            eps_mu: eps.0,
            eps_s: eps.1,
            iterations,
            lr_position: lr[0],
            lr_rotation: lr[1],
            lr_log_scale: lr[2],
            lr_opacity: lr[3],
            lr_color: lr[4],
            beta1: betas.0,
            beta2: betas.1,
            init_scale_factor: init.0,
            init_opacity_logit: init.1,
            init_perturbation: init.2,
            rest_obj: paths.first().map(|p| PathBuf::from("/data").join(p)),
            deformed_objs: paths.iter().map(|p| PathBuf::from("/data").join(p)).collect(),
            seed,
            ..RunConfig::default()
        }
    }
}

proptest! {
    #[test]
    fn serialized_config_parses_back_equal(c in configs()) {
        let text = c.to_text();
        let back = RunConfig::parse(&text, Path::new("/elsewhere")).unwrap();
        prop_assert_eq!(back, c);
    }
}
