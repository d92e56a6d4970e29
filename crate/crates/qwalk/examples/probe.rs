use qwalk::analytic::{analytic_variance, coherent_reference, decoherent_distribution};
use qwalk::observables::{distribution, moments, negativity, purity, total_variation};
use qwalk::walker::{NoiseModel, PureCoinState, WalkerDensityMatrix};

fn main() {
    let coin_r = PureCoinState::new(0.0, 0.0);

    // Negativity at t=30 vs p for both channels.
    println!("-- negativity at t=30 --");
    for p in [0.0, 0.2, 0.3, 0.5, 0.8, 1.0] {
        let mut line = format!("p={p:.1}");
        for noise in [NoiseModel::Tunneling(p), NoiseModel::CoinMeasurement(p)] {
            let rho = WalkerDensityMatrix::new(coin_r.bloch(), 30)
                .unwrap()
                .evolve(&noise, 30, |_, _| {})
                .unwrap();
            line += &format!("  {:?}={:.4}", noise, negativity(&rho).unwrap());
        }
        println!("{line}");
    }

    // Trend split: negativity(40) - negativity(10) for tunneling p=0.2, 0.8.
    println!("-- trend split --");
    for p in [0.2, 0.8] {
        let rho0 = WalkerDensityMatrix::new(coin_r.bloch(), 40).unwrap();
        let at10 = rho0
            .evolve(&NoiseModel::Tunneling(p), 10, |_, _| {})
            .unwrap();
        let n10 = negativity(&at10).unwrap();
        let at40 = at10
            .evolve(&NoiseModel::Tunneling(p), 30, |_, _| {})
            .unwrap();
        let n40 = negativity(&at40).unwrap();
        println!("p={p}: N(10)={n10:.4} N(40)={n40:.4} diff={:.4}", n40 - n10);
    }

    // Purity at t=20 under p=0.5.
    let rho = WalkerDensityMatrix::new(coin_r.bloch(), 20)
        .unwrap()
        .evolve(&NoiseModel::Tunneling(0.5), 20, |_, _| {})
        .unwrap();
    println!("purity(p=0.5, t=20) = {:.4}", purity(&rho));

    // Variance closed form vs simulation at t=100.
    println!("-- variance t=100 --");
    let states = [
        ("R", PureCoinState::new(0.0, 0.0)),
        ("L", PureCoinState::new(std::f64::consts::FRAC_PI_2, 0.0)),
        (
            "sym",
            PureCoinState::new(
                std::f64::consts::FRAC_PI_4,
                std::f64::consts::FRAC_PI_2,
            ),
        ),
    ];
    for (name, coin) in states {
        for p in [0.0, 0.3, 0.7] {
            let rho = WalkerDensityMatrix::new(coin.bloch(), 100)
                .unwrap()
                .evolve(&NoiseModel::Tunneling(p), 100, |_, _| {})
                .unwrap();
            let v_sim = moments(&distribution(&rho).unwrap()).variance;
            let v_formula = analytic_variance(&coin.bloch(), p, 100).unwrap();
            println!(
                "{name} p={p}: sim={v_sim:.3} formula={v_formula:.3} rel={:.5}",
                (v_sim - v_formula).abs() / v_sim
            );
        }
    }

    // Smoothness at t=100.
    println!("-- total variation t=100 --");
    let p0 = coherent_reference(&coin_r, 100).unwrap();
    for p in [0.01, 0.5, 0.9, 0.95, 0.97, 0.99, 1.0] {
        let tv = total_variation(&decoherent_distribution(&p0, p).unwrap());
        println!("p={p}: TV={tv:.5}");
    }
}
