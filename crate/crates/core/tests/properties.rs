//! Cross-module properties on random networks.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relay_secrecy::channel::draw_network;
use relay_secrecy::linalg::{gather_column_blocks, vstack, CMatrix};
use relay_secrecy::precoding::{zf_precoder, LinkTarget};
use relay_secrecy::selection::{direct_transmission, served_users};
use relay_secrecy::simulation::ScenarioConfig;
use relay_secrecy::Error;

fn scenario(fig3: bool, relays: usize) -> ScenarioConfig {
    let mut c = if fig3 {
        ScenarioConfig::fig3()
    } else {
        ScenarioConfig::fig2()
    };
    c.relays = relays;
    c
}

proptest! {
    #[test]
    fn network_zero_forcing_inverts(seed in any::<u64>(), fig3 in any::<bool>(), relays in 1usize..6) {
        let config = scenario(fig3, relays);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = draw_network(&config, 10.0, &mut rng).unwrap();
        let n = config.relay_antennas;
        let set: Vec<usize> = (0..relays.min(3)).collect();
        let users = served_users(&net, &set);
        prop_assert_eq!(users.len(), set.len());
        let stacked: Vec<CMatrix> = users.iter().map(|&u| gather_column_blocks(&net.rd[u].h, &set, n)).collect();
        let h = vstack(&stacked);
        match zf_precoder(&h, LinkTarget::Unspecified) {
            Ok(p) => {
                let k = h.nrows();
                prop_assert!((&h * &p.matrix - CMatrix::identity(k, k)).norm() <= 1e-9);
            }
            Err(Error::SingularChannel { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn direct_rates_are_consistent(seed in any::<u64>(), fig3 in any::<bool>(), snr in -10.0f64..30.0) {
        let config = scenario(fig3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = draw_network(&config, snr, &mut rng).unwrap();
        if let Ok(r) = direct_transmission(&net) {
            prop_assert!(r.r_d >= 0.0 && r.r_e >= 0.0);
            prop_assert!((r.r_secrecy - (r.r_d - r.r_e)).abs() < 1e-12);
            prop_assert_eq!(r.r_secrecy_clipped, r.r_secrecy.max(0.0));
        }
    }
}
