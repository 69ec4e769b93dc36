use rand::seq::index::sample;
use rand::Rng;

use super::{ActionGrid, GroundTruth, PourState};
use crate::gp::{Dataset, Feature, Sample};
use crate::{Error, Result};

/// Random transitions: true level uniform in `[0, 80]`, action uniform over
/// the grid. Both the recorded level and the target are noisy observations.
pub fn gen_dataset(gt: &GroundTruth, grid: &ActionGrid, n: usize, rng: &mut impl Rng) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("dataset size must be at least 1".into()));
    }
    let actions = grid.actions();
    if actions.is_empty() {
        return Err(Error::InvalidArgument("empty action grid".into()));
    }
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let true_level = rng.random_range(0.0..=80.0);
        let action = actions[rng.random_range(0..actions.len())];
        let observed = gt.observe(true_level, rng);
        let next = gt.true_step(&PourState::clamped(true_level), &action);
        let target = gt.observe(next.level(), rng);
        samples.push(Sample {
            feature: Feature { level: observed, alpha: action.alpha, duration: action.duration },
            next_level: target,
        });
    }
    Dataset::new(samples)
}

/// `m` distinct rows of `data`, in their original order.
pub fn subsample(data: &Dataset, m: usize, rng: &mut impl Rng) -> Result<Dataset> {
    if m == 0 || m > data.len() {
        return Err(Error::InvalidArgument(format!("cannot draw {m} points from a dataset of {}", data.len())));
    }
    let mut idx = sample(rng, data.len(), m).into_vec();
    idx.sort_unstable();
    Dataset::new(idx.into_iter().map(|i| data.samples()[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use rand::SeedableRng;

    #[test]
    fn forty_rows_in_range() {
        let mut rng = StreamRng::seed_from_u64(5);
        let d = gen_dataset(&GroundTruth::default(), &ActionGrid::default(), 40, &mut rng).unwrap();
        assert_eq!(d.len(), 40);
        assert!(d.samples().iter().all(|s| (0.0..=100.0).contains(&s.next_level)));
    }

    #[test]
    fn same_seed_same_dataset() {
        let gen = |s| {
            let mut rng = StreamRng::seed_from_u64(s);
            gen_dataset(&GroundTruth::default(), &ActionGrid::default(), 12, &mut rng).unwrap()
        };
        assert_eq!(gen(3), gen(3));
        assert_ne!(gen(3), gen(4));
    }

    #[test]
    fn subsample_is_a_sub_multiset() {
        let mut rng = StreamRng::seed_from_u64(1);
        let d = gen_dataset(&GroundTruth::default(), &ActionGrid::default(), 40, &mut rng).unwrap();
        let s = subsample(&d, 20, &mut rng).unwrap();
        assert_eq!(s.len(), 20);
        let mut pool: Vec<_> = d.samples().to_vec();
        for x in s.samples() {
            let i = pool.iter().position(|p| p == x).expect("row from parent");
            pool.swap_remove(i);
        }
        assert!(subsample(&d, 41, &mut rng).is_err());
        assert!(gen_dataset(&GroundTruth::default(), &ActionGrid::default(), 0, &mut rng).is_err());
    }
}
