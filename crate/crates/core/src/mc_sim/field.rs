//! Probability that a node added at x links directly to at least one existing node.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::distance;
use crate::linkmodels::ConnectionModel;

/// Regular lattice including both endpoints on every axis; x varies fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice<const D: usize> {
    #[serde(with = "serde_arrays")]
    pub lo: [f64; D],
    #[serde(with = "serde_arrays")]
    pub hi: [f64; D],
    #[serde(with = "serde_arrays")]
    pub counts: [usize; D],
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, T: Serialize, const D: usize>(
        a: &[T; D],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        a.as_slice().serialize(s)
    }

    pub fn deserialize<'de, De, T, const D: usize>(d: De) -> Result<[T; D], De::Error>
    where
        De: Deserializer<'de>,
        T: Deserialize<'de>,
    {
        let v = Vec::<T>::deserialize(d)?;
        let len = v.len();
        v.try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {D} entries, got {len}")))
    }
}

impl<const D: usize> Lattice<D> {
    pub fn new(lo: [f64; D], hi: [f64; D], counts: [usize; D]) -> Result<Self> {
        for k in 0..D {
            if counts[k] == 0 {
                return domain("lattice needs at least one point per axis");
            }
            if !(lo[k].is_finite() && hi[k].is_finite() && hi[k] >= lo[k]) {
                return domain("lattice bounds must be finite with hi >= lo");
            }
        }
        Ok(Self { lo, hi, counts })
    }

    /// `per_axis` points per axis over the box [lo, hi].
    pub fn uniform(lo: [f64; D], hi: [f64; D], per_axis: usize) -> Result<Self> {
        Self::new(lo, hi, [per_axis; D])
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        if self.counts[axis] == 1 {
            0.5 * (self.lo[axis] + self.hi[axis])
        } else {
            self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / (self.counts[axis] - 1) as f64
        }
    }

    pub fn point(&self, mut index: usize) -> [f64; D] {
        let mut p = [0.0; D];
        for (k, c) in p.iter_mut().enumerate() {
            *c = self.coord(k, index % self.counts[k]);
            index /= self.counts[k];
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field<const D: usize> {
    pub lattice: Lattice<D>,
    pub values: Vec<f64>,
}

impl<const D: usize> Field<D> {
    /// Lattice index, position and value of the smallest entry (first on ties).
    pub fn argmin(&self) -> Option<(usize, [f64; D], f64)> {
        let (i, &v) = self
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))?;
        Some((i, self.lattice.point(i), v))
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; D], f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.lattice.point(i), v))
    }
}

/// 1 − ∏ᵢ (1 − H(|x − rᵢ|)) on every lattice point. An empty point set gives 0.
pub fn connection_field<const D: usize>(
    points: &[[f64; D]],
    model: &ConnectionModel,
    lattice: &Lattice<D>,
) -> Result<Field<D>> {
    let values = (0..lattice.len())
        .into_par_iter()
        .map(|idx| {
            let x = lattice.point(idx);
            let mut log_miss = 0.0;
            for p in points {
                let h = model.pair_connectedness(distance(&x, p))?;
                log_miss += (-h).ln_1p();
            }
            Ok(0.0 - log_miss.exp_m1())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Field { lattice: *lattice, values })
}

/// Distance from `x` to the closest of `targets` (infinite if there are none).
pub fn nearest_distance<const D: usize>(x: &[f64; D], targets: &[[f64; D]]) -> f64 {
    targets.iter().map(|t| distance(x, t)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkmodels::PathLossParams;

    fn siso2() -> ConnectionModel {
        ConnectionModel::siso(PathLossParams::new(1.0, 2.0, 2).unwrap())
    }

    #[test]
    fn single_node_gives_one_at_its_position() {
        let lat = Lattice::new([0.0, 0.0], [2.0, 2.0], [3, 3]).unwrap();
        let f = connection_field(&[[1.0, 1.0]], &siso2(), &lat).unwrap();
        assert_eq!(f.values[4], 1.0);
        assert!((f.values[0] - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn empty_influence_is_zero() {
        let params = PathLossParams::new(1.0, 2.0, 2).unwrap();
        let disk = ConnectionModel::unit_disk(0.5, params).unwrap();
        let lat = Lattice::uniform([0.0, 0.0], [1.0, 1.0], 5).unwrap();
        let f = connection_field(&[[10.0, 10.0]], &disk, &lat).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0 && v.is_sign_positive()));
        let f = connection_field::<2>(&[], &siso2(), &lat).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bounded_below_by_the_strongest_link() {
        let pts = [[0.3, 0.2], [1.7, 0.9], [1.1, 1.6]];
        let model = siso2();
        let lat = Lattice::uniform([0.0, 0.0], [2.0, 2.0], 9).unwrap();
        let f = connection_field(&pts, &model, &lat).unwrap();
        for (x, v) in f.iter() {
            let best = pts
                .iter()
                .map(|p| model.pair_connectedness(distance(&x, p)).unwrap())
                .fold(0.0, f64::max);
            assert!((0.0..=1.0).contains(&v) && v >= best - 1e-15);
        }
    }

    #[test]
    fn lattice_layout() {
        let lat = Lattice::new([0.0, 0.0], [10.0, 5.0], [3, 2]).unwrap();
        assert_eq!(lat.len(), 6);
        assert_eq!(lat.point(0), [0.0, 0.0]);
        assert_eq!(lat.point(2), [10.0, 0.0]);
        assert_eq!(lat.point(5), [10.0, 5.0]);
        let lat = Lattice::new([1.0], [3.0], [1]).unwrap();
        assert_eq!(lat.point(0), [2.0]);
        assert!(Lattice::new([0.0], [1.0], [0]).is_err());
    }

    #[test]
    fn argmin_and_nearest() {
        let lat = Lattice::new([0.0], [3.0], [4]).unwrap();
        let f = Field { lattice: lat, values: vec![0.5, 0.2, 0.2, 0.9] };
        assert_eq!(f.argmin(), Some((1, [1.0], 0.2)));
        assert_eq!(nearest_distance(&[1.0, 1.0], &[[0.0, 1.0], [4.0, 5.0]]), 1.0);
    }
}
