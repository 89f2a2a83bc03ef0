use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Size of the component of a fixed vertex in `G(n, p̃)`, explored as a
/// queue walk: `N_0 = n - 1`, `N_t ~ Bin(N_{t-1}, 1 - p̃)` unexplored
/// vertices, `Y_t = n - t - N_t` active ones, and `T = min{t : Y_t = 0}`.
pub fn component_size_walk<R: Rng + ?Sized>(n: u64, ptilde: f64, rng: &mut R) -> u64 {
    assert!((0.0..=1.0).contains(&ptilde), "p̃ = {ptilde} is not a probability");
    if n == 0 {
        return 0;
    }
    let mut unexplored = n - 1;
    let mut t = 0;
    loop {
        t += 1;
        unexplored = if unexplored == 0 {
            0
        } else {
            Binomial::new(unexplored, 1.0 - ptilde)
                .expect("valid binomial")
                .sample(rng)
        };
        if n - t - unexplored == 0 {
            return t;
        }
    }
}
