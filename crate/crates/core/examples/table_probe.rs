// scratch probe: joint offset distribution under varying setup hypotheses
use rand::SeedableRng;
use vpsim::lattice::se_solve;
use vpsim::lattice::IlsInstance;
use vpsim::numerics::sample_channel;
use vpsim::precoding::{precoder_r_factor, Constellation};

fn probe(m: usize, k: usize, tau: f64, trials: u64, label: &str) {
    let cons = Constellation::new(4).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut counts = [[0u64; 3]; 2]; // [u=-1, u=+1][l=-1,0,+1]
    let mut overflow = 0u64;
    let mut samples = 0u64;
    for _ in 0..trials {
        let chan = match sample_channel(k, m, &mut rng) { Ok(c) => c, Err(_) => continue };
        let u = cons.random_vector(k, &mut rng);
        let rf = precoder_r_factor(&chan);
        let target = &rf * &u;
        let generator = rf.map(|z| z * (-tau));
        let l0 = se_solve(&IlsInstance::new(target, generator)).unwrap();
        for i in 0..k {
            for (sym, off) in [(u[i].re, l0[i].re), (u[i].im, l0[i].im)] {
                samples += 1;
                let row = if sym < 0.0 { 0 } else { 1 };
                if off.abs() <= 1 { counts[row][(off + 1) as usize] += 1; } else { overflow += 1; }
            }
        }
    }
    let p = |c: u64| c as f64 / samples as f64;
    println!("{label}: u=-1 [{:.4} {:.4} {:.4}]  u=+1 [{:.4} {:.4} {:.4}]  ovf {:.4}",
        p(counts[0][0]), p(counts[0][1]), p(counts[0][2]),
        p(counts[1][0]), p(counts[1][1]), p(counts[1][2]), p(overflow));
}

fn main() {
    println!("published:  u=-1 [0.0098 0.3972 0.0915]  u=+1 [0.0915 0.3972 0.0098]");
    probe(2, 2, 4.0, 60_000, "M=K=2 tau=4.0");
    probe(3, 3, 4.0, 40_000, "M=K=3 tau=4.0");
    probe(4, 4, 4.0, 30_000, "M=K=4 tau=4.0");
    probe(2, 2, 2.0 * 2f64.sqrt(), 60_000, "M=K=2 tau=2sqrt2");
    probe(2, 2, 3.0, 60_000, "M=K=2 tau=3.0");
    probe(2, 2, 2.0 * 2f64.sqrt() + 2.0, 60_000, "M=K=2 tau=2sqrt2+2");
}
