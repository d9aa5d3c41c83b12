//! Pose scoring between two expansions.
//!
//! The overlap of a rigidly moved template with a target,
//! I(R, t) = <T(t) Lambda(R) f, g>, reduces to coefficient arithmetic: tilt
//! both spectra so the translation points along +z, then contract with the
//! axial translation elements, which are diagonal in the azimuthal order.
//! A grid search evaluates the overlap over candidate poses in parallel,
//! reusing one translation table per distinct shift length.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use crate::sgl::{index_range, SglIndex, SglSpectrum};
use crate::specfun::KahanSum;
use crate::translate::{
    build_table, coupled_element, t_element, table_for_pose, Pose, TranslationTable,
};
use crate::wigner::{mat_mul, EulerZYZ};
use crate::{input_err, Result};

/// Candidate poses as a rotation set crossed with a translation set.
#[derive(Clone, Debug)]
pub struct PoseGrid {
    pub rotations: Vec<EulerZYZ>,
    pub translations: Vec<[f64; 3]>,
}

impl PoseGrid {
    pub fn len(&self) -> usize {
        self.rotations.len() * self.translations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Poses in rotation-major order; the position in this sequence is the
    /// grid index used to break score ties.
    pub fn poses(&self) -> impl Iterator<Item = Pose> + '_ {
        self.rotations
            .iter()
            .flat_map(move |&r| self.translations.iter().map(move |&t| Pose::new(r, t)))
    }

    /// Parses `{"rotations": [[alpha, beta, gamma], ..],
    /// "translations": [[x, y, z], ..]}`. Both lists must be nonempty.
    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct GridFile {
            rotations: Vec<[f64; 3]>,
            translations: Vec<[f64; 3]>,
        }
        let file: GridFile = serde_json::from_str(text)
            .map_err(|e| crate::Error::Input(format!("pose grid: {e}")))?;
        if file.rotations.is_empty() || file.translations.is_empty() {
            return input_err("pose grid: rotations and translations must be nonempty".to_string());
        }
        Ok(Self {
            rotations: file.rotations.iter().map(|&[a, b, g]| EulerZYZ::new(a, b, g)).collect(),
            translations: file.translations,
        })
    }
}

/// One scored pose. `score` is the overlap magnitude; `rank` starts at 1.
#[derive(Clone, Debug)]
pub struct MatchResult {
    pub pose: Pose,
    pub overlap: Complex64,
    pub score: f64,
    pub rank: u32,
}

/// Stable JSON rendering of ranked results.
pub fn results_to_json(results: &[MatchResult]) -> String {
    let values: Vec<serde_json::Value> = results
        .iter()
        .map(|r| {
            serde_json::json!({
                "rank": r.rank,
                "score": r.score,
                "overlap": {"re": r.overlap.re, "im": r.overlap.im},
                "pose": {
                    "rotation": [r.pose.rotation.alpha, r.pose.rotation.beta, r.pose.rotation.gamma],
                    "translation": r.pose.translation_cartesian(),
                },
            })
        })
        .collect();
    serde_json::to_string_pretty(&values).expect("result serialization cannot fail")
}

fn coeff_dot(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for (a, b) in f.iter().zip(g) {
        let v = a * b.conj();
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Overlap I(R, t) = <T(t) Lambda(R) f, g> of two equal-bandwidth spectra.
///
/// Conjugating with the tilt that lifts t onto +z leaves an axial problem:
/// I = sum f'_{nlm} conj(g'_{n'l'm}) t^(|m|)_{nn'll'}(nu) with f' the
/// coefficients rotated by tilt*R and g' rotated by the tilt alone. The
/// summation order is fixed by the index layout, so equal inputs give
/// bitwise equal results regardless of surrounding parallelism.
pub fn overlap(
    f: &SglSpectrum,
    g: &SglSpectrum,
    pose: &Pose,
    table: Option<&TranslationTable>,
) -> Result<Complex64> {
    if f.bandwidth() != g.bandwidth() {
        return input_err(format!(
            "overlap: spectra have different bandwidths ({} vs {})",
            f.bandwidth(),
            g.bandwidth()
        ));
    }
    let bandwidth = f.bandwidth();
    if pose.nu == 0.0 {
        let f_rot = f.rotated(&pose.rotation);
        return Ok(coeff_dot(f_rot.coeffs(), g.coeffs()));
    }
    let table = table_for_pose(table, pose.nu, bandwidth)?;
    let tilt = pose.tilt_matrix();
    let f_rot = f.rotated(&EulerZYZ::from_matrix(&mat_mul(&tilt, &pose.rotation.to_matrix())));
    let g_rot = g.rotated(&EulerZYZ::from_matrix(&tilt));

    let indices: Vec<SglIndex> = index_range(bandwidth).collect();
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for (a, idx) in indices.iter().enumerate() {
        let fa = f_rot.coeffs()[a];
        if fa == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (b, idx_p) in indices.iter().enumerate() {
            if idx.m != idx_p.m {
                continue;
            }
            let t = match table {
                Some(tab) => tab
                    .get(idx.n, idx_p.n, idx.l, idx_p.l, idx.m.unsigned_abs())
                    .expect("table covers the shared bandwidth"),
                None => t_element(idx.n, idx_p.n, idx.l, idx_p.l, idx.m.unsigned_abs(), pose.nu)?,
            };
            if t == 0.0 {
                continue;
            }
            let v = fa * g_rot.coeffs()[b].conj() * t;
            re.add(v.re);
            im.add(v.im);
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Projects the rigidly moved field T(t) Lambda(R) f onto the basis up to
/// `out_bandwidth`. The result is exact, not truncated, once
/// out_bandwidth >= 2 * f.bandwidth() - 1, because a rigid motion keeps the
/// field polynomial of the same total degree.
pub fn apply_pose(f: &SglSpectrum, pose: &Pose, out_bandwidth: u32) -> Result<SglSpectrum> {
    let table = if pose.nu > 0.0 {
        Some(build_table(out_bandwidth.max(f.bandwidth()), pose.nu)?)
    } else {
        None
    };
    let mut out = SglSpectrum::zeros(out_bandwidth);
    let f_indices: Vec<SglIndex> = index_range(f.bandwidth()).collect();
    for idx_out in index_range(out_bandwidth) {
        let mut re = KahanSum::default();
        let mut im = KahanSum::default();
        for (a, idx_in) in f_indices.iter().enumerate() {
            let fa = f.coeffs()[a];
            if fa == Complex64::new(0.0, 0.0) {
                continue;
            }
            let elem = coupled_element(*idx_in, idx_out, pose, table.as_ref())?;
            let v = fa * elem;
            re.add(v.re);
            im.add(v.im);
        }
        out.set(idx_out, Complex64::new(re.value(), im.value()));
    }
    Ok(out)
}

/// One translation table per distinct shift length, shared across poses.
/// Lengths are keyed at twelve significant digits, and the table is built at
/// the rounded length itself, never at the particular length that happened
/// to arrive first. Every pose mapping to a key therefore sees one fixed
/// table, which keeps scores independent of evaluation order.
struct TableCache {
    bandwidth: u32,
    map: RwLock<HashMap<String, Arc<TranslationTable>>>,
}

impl TableCache {
    fn new(bandwidth: u32) -> Self {
        Self { bandwidth, map: RwLock::new(HashMap::new()) }
    }

    fn get(&self, nu: f64) -> Result<Arc<TranslationTable>> {
        let key = format!("{nu:.11e}");
        if let Some(hit) = self.map.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let canonical: f64 = key.parse().expect("self-formatted float");
        let built = Arc::new(build_table(self.bandwidth, canonical)?);
        let mut map = self.map.write().expect("cache lock");
        Ok(map.entry(key).or_insert(built).clone())
    }
}

/// Scores every pose of the grid and returns the best `top_k`, ranked by
/// descending overlap magnitude with grid order breaking ties. Poses are
/// evaluated in parallel; the ranking is deterministic.
pub fn grid_search(
    f: &SglSpectrum,
    g: &SglSpectrum,
    grid: &PoseGrid,
    top_k: usize,
) -> Result<Vec<MatchResult>> {
    if f.bandwidth() != g.bandwidth() {
        return input_err(format!(
            "grid_search: spectra have different bandwidths ({} vs {})",
            f.bandwidth(),
            g.bandwidth()
        ));
    }
    if grid.is_empty() {
        return input_err("grid_search: pose grid is empty".to_string());
    }
    if top_k == 0 {
        return input_err("grid_search: top_k must be at least 1".to_string());
    }
    let cache = TableCache::new(f.bandwidth());
    let poses: Vec<(usize, Pose)> = grid.poses().enumerate().collect();
    let mut scored: Vec<(usize, Pose, Complex64)> = poses
        .into_par_iter()
        .map(|(grid_index, pose)| {
            let value = if pose.nu > 0.0 {
                let table = cache.get(pose.nu)?;
                overlap(f, g, &pose, Some(&table))?
            } else {
                overlap(f, g, &pose, None)?
            };
            Ok((grid_index, pose, value))
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| {
        let sa = a.2.norm();
        let sb = b.2.norm();
        sb.partial_cmp(&sa).expect("scores are finite").then(a.0.cmp(&b.0))
    });
    scored.truncate(top_k);
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (_, pose, value))| MatchResult {
            pose,
            overlap: value,
            score: value.norm(),
            rank: i as u32 + 1,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_spectrum(bandwidth: u32, rng: &mut ChaCha8Rng) -> SglSpectrum {
        let mut s = SglSpectrum::zeros(bandwidth);
        for idx in index_range(bandwidth) {
            s.set(idx, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        s
    }

    #[test]
    fn rotation_preserves_overlap_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..5 {
            let f = random_spectrum(3, &mut rng);
            let rot = EulerZYZ::new(
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(-1.0f64..1.0).acos(),
                rng.gen_range(0.0..2.0 * PI),
            );
            let g = f.rotated(&rot);
            let i = overlap(&f, &g, &Pose::rotation_only(rot), None).unwrap();
            assert_relative_eq!(i.re, f.norm_squared(), max_relative = 1e-12);
            assert!(i.im.abs() <= 1e-12 * f.norm_squared());
        }
    }

    /// The coefficient-space overlap must agree with contracting every pair
    /// of basis elements through coupled_element, which rotates Wigner
    /// matrices instead of coefficient vectors.
    #[test]
    fn overlap_matches_elementwise_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let f = random_spectrum(3, &mut rng);
        let g = random_spectrum(3, &mut rng);
        let pose =
            Pose::new(EulerZYZ::new(0.9, 0.6, 5.1), [0.25, -0.35, 0.4]);
        let fast = overlap(&f, &g, &pose, None).unwrap();
        let mut brute = Complex64::new(0.0, 0.0);
        let indices: Vec<SglIndex> = index_range(3).collect();
        for (a, ia) in indices.iter().enumerate() {
            for (b, ib) in indices.iter().enumerate() {
                brute += f.coeffs()[a]
                    * g.coeffs()[b].conj()
                    * coupled_element(*ia, *ib, &pose, None).unwrap();
            }
        }
        assert!((fast - brute).norm() <= 1e-10 * brute.norm().max(1.0));
    }

    #[test]
    fn overlap_validates_inputs() {
        let f = SglSpectrum::zeros(3);
        let g = SglSpectrum::zeros(2);
        let pose = Pose::identity();
        assert!(overlap(&f, &g, &pose, None).is_err());

        let g3 = SglSpectrum::zeros(3);
        let shifted = Pose::new(EulerZYZ::identity(), [0.0, 0.0, 0.5]);
        let wrong = build_table(3, 0.7).unwrap();
        assert!(overlap(&f, &g3, &shifted, Some(&wrong)).is_err());
    }

    #[test]
    fn apply_pose_round_trips_through_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let f = random_spectrum(2, &mut rng);
        let pose = Pose::new(EulerZYZ::new(0.3, 0.7, 1.9), [0.2, -0.1, 0.3]);
        // Bandwidth 3 holds the moved bandwidth-2 field exactly, so a wider
        // projection adds nothing: same coefficients, zeros above n = 3.
        let g = apply_pose(&f, &pose, 3).unwrap();
        let wide = apply_pose(&f, &pose, 5).unwrap();
        for idx in wide.indices() {
            if idx.n <= 3 {
                assert!((wide.get(idx) - g.get(idx)).norm() <= 1e-12);
            } else {
                assert!(wide.get(idx).norm() <= 1e-12);
            }
        }
        // Overlapping the source against its own exact image recovers the
        // image's squared norm. The translation reweights the Gaussian, so
        // this is not the norm of f itself.
        let f_pad = f.padded(3).unwrap();
        let i = overlap(&f_pad, &g, &pose, None).unwrap();
        assert_relative_eq!(i.re, g.norm_squared(), max_relative = 1e-10);
        assert!(i.im.abs() <= 1e-10 * g.norm_squared());
    }

    #[test]
    fn grid_search_finds_planted_pose() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let f = random_spectrum(3, &mut rng);
        let planted = Pose::new(EulerZYZ::new(0.3, 0.7, 1.9), [0.2, -0.1, 0.3]);
        let g = apply_pose(&f, &planted, 5).unwrap();
        let f_pad = f.padded(5).unwrap();

        let grid = PoseGrid {
            rotations: vec![
                EulerZYZ::identity(),
                EulerZYZ::new(0.3, 0.7, 1.9),
                EulerZYZ::new(2.0, 1.2, 0.4),
            ],
            translations: vec![[0.0, 0.0, 0.0], [0.2, -0.1, 0.3], [-0.3, 0.2, 0.1]],
        };
        let results = grid_search(&f_pad, &g, &grid, 9).unwrap();
        assert_eq!(results.len(), 9);
        assert_eq!(results[0].rank, 1);
        // At the planted pose the overlap is <g, g>, the moved field's own
        // squared norm.
        let best = &results[0];
        assert_relative_eq!(best.score, g.norm_squared(), max_relative = 1e-8);
        let bt = best.pose.translation_cartesian();
        for (got, want) in bt.iter().zip(&[0.2, -0.1, 0.3]) {
            assert!((got - want).abs() <= 1e-12);
        }
        assert!((best.pose.rotation.alpha - 0.3).abs() <= 1e-12);

        // Every later rank scores no higher.
        for pair in results.windows(2) {
            assert!(pair[0].score >= pair[1].score);
        }
    }

    #[test]
    fn grid_order_does_not_change_pose_scores() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let f = random_spectrum(2, &mut rng);
        let g = random_spectrum(2, &mut rng);
        let grid = PoseGrid {
            rotations: vec![EulerZYZ::identity(), EulerZYZ::new(1.0, 0.5, 0.2)],
            translations: vec![[0.0, 0.0, 0.3], [0.3, 0.0, 0.0], [0.1, 0.2, -0.2]],
        };
        let reversed = PoseGrid {
            rotations: grid.rotations.iter().rev().copied().collect(),
            translations: grid.translations.iter().rev().copied().collect(),
        };
        let take_all = grid.len();
        let forward = grid_search(&f, &g, &grid, take_all).unwrap();
        let backward = grid_search(&f, &g, &reversed, take_all).unwrap();
        // Same pose set, so the same multiset of scores, bit for bit.
        let mut a: Vec<u64> = forward.iter().map(|r| r.score.to_bits()).collect();
        let mut b: Vec<u64> = backward.iter().map(|r| r.score.to_bits()).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn cached_tables_match_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let f = random_spectrum(2, &mut rng);
        let g = random_spectrum(2, &mut rng);
        // Axis-aligned shifts of equal length share one cached table.
        let grid = PoseGrid {
            rotations: vec![EulerZYZ::identity()],
            translations: vec![[0.0, 0.0, 0.5], [0.5, 0.0, 0.0], [0.0, 0.5, 0.0]],
        };
        let results = grid_search(&f, &g, &grid, 3).unwrap();
        for r in &results {
            let direct = overlap(&f, &g, &r.pose, None).unwrap();
            assert!((direct - r.overlap).norm() <= 1e-13);
        }
    }

    #[test]
    fn grid_search_validates_inputs() {
        let f = SglSpectrum::zeros(2);
        let empty = PoseGrid { rotations: vec![], translations: vec![[0.0; 3]] };
        assert!(grid_search(&f, &f, &empty, 1).is_err());
        let grid = PoseGrid { rotations: vec![EulerZYZ::identity()], translations: vec![[0.0; 3]] };
        assert!(grid_search(&f, &f, &grid, 0).is_err());
        let g = SglSpectrum::zeros(3);
        assert!(grid_search(&f, &g, &grid, 1).is_err());
    }

    #[test]
    fn pose_grid_json_parsing() {
        let ok = r#"{"rotations": [[0.0, 0.5, 1.0]], "translations": [[0.1, 0.2, 0.3]]}"#;
        let grid = PoseGrid::from_json_str(ok).unwrap();
        assert_eq!(grid.len(), 1);
        assert!(PoseGrid::from_json_str("{").is_err());
        assert!(PoseGrid::from_json_str(r#"{"rotations": [], "translations": [[0,0,0]]}"#).is_err());
        assert!(PoseGrid::from_json_str(r#"{"rotations": [[0,0,0]]}"#).is_err());
    }
}
