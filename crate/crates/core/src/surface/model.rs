use serde::{Deserialize, Serialize};

use crate::arith::lattice::{hnf, primitive_on_ray, LatticeVector};
use crate::arith::lp;
use crate::arith::matrix::{inertia, RationalMatrix};
use crate::arith::rational::{common_denominator, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveFlag {
    /// Exceptional curve of the most recent blow-up.
    Exceptional,
    /// Component of the boundary.
    Boundary,
}

/// A stored effective curve class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub coords: Vec<Rational>,
    pub pa: Rational,
    #[serde(default)]
    pub flags: Vec<CurveFlag>,
    /// Boundary coefficient in `[0, 1]`; absent means 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Rational>,
}

impl Curve {
    pub fn has_flag(&self, f: CurveFlag) -> bool {
        self.flags.contains(&f)
    }

    pub fn boundary_coeff(&self) -> Rational {
        self.boundary.clone().unwrap_or_default()
    }

    fn set_flag(&mut self, f: CurveFlag, on: bool) {
        self.flags.retain(|&g| g != f);
        if on {
            self.flags.push(f);
            self.flags.sort();
        }
    }
}

/// A Picard lattice with intersection form, canonical class, and known curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceModel {
    basis: Vec<String>,
    gram: RationalMatrix,
    #[serde(rename = "K")]
    k: Vec<Rational>,
    curves: Vec<Curve>,
    ne_certified: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceJson {
    basis: Vec<String>,
    gram: RationalMatrix,
    #[serde(rename = "K")]
    k: Vec<Rational>,
    #[serde(default)]
    curves: Vec<Curve>,
    #[serde(default)]
    ne_certified: bool,
}

impl<'de> Deserialize<'de> for SurfaceModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = SurfaceJson::deserialize(deserializer)?;
        SurfaceModel::new(j.basis, j.gram, j.k, j.curves, j.ne_certified).map_err(serde::de::Error::custom)
    }
}

/// Outcome of the `C² < 0` criterion for extremal rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremalVerdict {
    Extremal,
    NotExtremalUnlessRho1,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NefVerdict {
    Ample,
    NefNotAmple { zero_curve: usize },
    NotNef { witness: usize, value: Rational },
}

/// An extremal ray of the cone spanned by the stored curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceRay {
    /// Primitive integer vector on the ray.
    pub direction: LatticeVector,
    /// Class of the smallest stored curve on the ray.
    pub class: Vec<Rational>,
    pub representative: usize,
    pub curves: Vec<usize>,
}

impl SurfaceModel {
    /// Validates symmetry, hyperbolic signature, lengths, boundary range, and stored genera.
    pub fn new(
        basis: Vec<String>,
        gram: RationalMatrix,
        k: Vec<Rational>,
        curves: Vec<Curve>,
        ne_certified: bool,
    ) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidModel("empty basis".into()));
        }
        if gram.rows() != n || gram.cols() != n {
            return Err(Error::InvalidModel(format!("gram must be {n}×{n}")));
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let (pos, _, zero) = inertia(&gram)?;
        if pos != 1 || zero != 0 {
            return Err(Error::InvalidModel("intersection form must have signature (1, ρ−1)".into()));
        }
        if k.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: k.len() });
        }
        let mut m = SurfaceModel { basis, gram, k, curves: Vec::new(), ne_certified };
        for (i, mut c) in curves.into_iter().enumerate() {
            if c.coords.len() != n {
                return Err(Error::InvalidModel(format!("curve {i}: expected {n} coordinates")));
            }
            let pa = m.arithmetic_genus(&c.coords);
            if c.pa != pa {
                return Err(Error::InvalidModel(format!("curve {i}: stored p_a {} but adjunction gives {pa}", c.pa)));
            }
            if let Some(b) = &c.boundary {
                if b.is_negative() || *b > Rational::one() {
                    return Err(Error::InvalidModel(format!("curve {i}: boundary coefficient {b} outside [0,1]")));
                }
            }
            let on = c.boundary.as_ref().is_some_and(Rational::is_positive);
            c.set_flag(CurveFlag::Boundary, on);
            m.curves.push(c);
        }
        Ok(m)
    }

    /// `P²` blown up at `k` general points, with a certified list of Mori cone generators for `k ≤ 8`.
    pub fn p2_blowup(k: usize) -> Result<Self> {
        if k > 9 {
            return Err(Error::Unsupported(format!("blow-up of P² at {k} > 9 points")));
        }
        let n = k + 1;
        let mut basis = vec!["H".to_string()];
        basis.extend((1..=k).map(|i| format!("E{i}")));
        let mut gram = RationalMatrix::identity(n);
        for i in 1..n {
            gram.set(i, i, -Rational::one());
        }
        let mut kc = vec![Rational::one(); n];
        kc[0] = Rational::from(-3);
        let classes: Vec<Vec<i64>> = match k {
            0 => vec![vec![1]],
            1 => vec![vec![0, 1], vec![1, -1]],
            2..=8 => super::enumerate::enumerate_minus_one_classes(k, 6)?,
            _ => (1..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
        };
        let mut m = SurfaceModel { basis, gram, k: kc, curves: Vec::new(), ne_certified: k <= 8 };
        for c in classes {
            m.push_curve(c.into_iter().map(Rational::from).collect(), None);
        }
        Ok(m)
    }

    /// Convenience for tests: `P²` blown up, with the given curves instead of the certified list.
    pub fn p2_blowup_with(k: usize, curves: &[Vec<i64>], ne_certified: bool) -> Result<Self> {
        let mut m = SurfaceModel::p2_blowup(k)?;
        m.curves.clear();
        m.ne_certified = ne_certified;
        for c in curves {
            if c.len() != k + 1 {
                return Err(Error::DimensionMismatch { expected: k + 1, found: c.len() });
            }
            m.push_curve(c.iter().map(|&x| Rational::from(x)).collect(), None);
        }
        Ok(m)
    }

    pub fn push_curve(&mut self, coords: Vec<Rational>, boundary: Option<Rational>) -> usize {
        let pa = self.arithmetic_genus(&coords);
        let mut c = Curve { coords, pa, flags: Vec::new(), boundary };
        let on = c.boundary.as_ref().is_some_and(Rational::is_positive);
        c.set_flag(CurveFlag::Boundary, on);
        self.curves.push(c);
        self.curves.len() - 1
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn canonical(&self) -> &[Rational] {
        &self.k
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    /// Sets the boundary coefficient of stored curve `i`.
    pub fn set_boundary(&mut self, i: usize, coeff: Rational) -> Result<()> {
        if coeff.is_negative() || coeff > Rational::one() {
            return Err(Error::InvalidModel(format!("boundary coefficient {coeff} outside [0,1]")));
        }
        let c = self.curves.get_mut(i).ok_or_else(|| Error::InvalidModel(format!("no curve {i}")))?;
        c.set_flag(CurveFlag::Boundary, coeff.is_positive());
        c.boundary = if coeff.is_zero() { None } else { Some(coeff) };
        Ok(())
    }

    pub fn ne_certified(&self) -> bool {
        self.ne_certified
    }

    pub fn set_ne_certified(&mut self, on: bool) {
        self.ne_certified = on;
    }

    pub fn rho(&self) -> usize {
        self.basis.len()
    }

    pub fn dot(&self, a: &[Rational], b: &[Rational]) -> Rational {
        self.gram.bilinear(a, b)
    }

    pub fn self_intersection(&self, c: &[Rational]) -> Rational {
        self.dot(c, c)
    }

    pub fn k_dot(&self, c: &[Rational]) -> Rational {
        self.dot(&self.k, c)
    }

    /// `p_a = 1 + (K + C)·C / 2`.
    pub fn arithmetic_genus(&self, c: &[Rational]) -> Rational {
        let kc: Vec<Rational> = self.k.iter().zip(c).map(|(a, b)| a + b).collect();
        Rational::one() + self.dot(&kc, c) / Rational::from(2)
    }

    /// The boundary divisor `B = Σ b_i C_i` over the stored curves.
    pub fn boundary_class(&self) -> Vec<Rational> {
        let mut b = vec![Rational::zero(); self.rho()];
        for c in &self.curves {
            if let Some(coef) = &c.boundary {
                for (x, y) in b.iter_mut().zip(&c.coords) {
                    *x += coef * y;
                }
            }
        }
        b
    }

    /// `K + B`.
    pub fn log_canonical(&self) -> Vec<Rational> {
        self.k.iter().zip(self.boundary_class()).map(|(a, b)| a + b).collect()
    }

    fn check_class(&self, c: &[Rational]) -> Result<()> {
        if c.len() != self.rho() {
            return Err(Error::DimensionMismatch { expected: self.rho(), found: c.len() });
        }
        Ok(())
    }

    /// Blows up a point lying on the listed curves with the given multiplicities.
    pub fn blow_up(&self, center: &[(usize, i64)]) -> Result<SurfaceModel> {
        for &(i, mult) in center {
            if mult < 0 {
                return Err(Error::Precondition(format!("negative multiplicity {mult}")));
            }
            if i >= self.curves.len() {
                return Err(Error::InvalidModel(format!("no curve {i}")));
            }
        }
        let n = self.rho();
        let mut basis = self.basis.clone();
        let label = (1..).map(|i| format!("E{i}")).find(|l| !basis.contains(l)).unwrap();
        basis.push(label);
        let mut gram = RationalMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                gram.set(i, j, self.gram.get(i, j).clone());
            }
        }
        gram.set(n, n, -Rational::one());
        let mut k = self.k.clone();
        k.push(Rational::one());
        let mut m = SurfaceModel { basis, gram, k, curves: Vec::new(), ne_certified: false };
        for (i, c) in self.curves.iter().enumerate() {
            let mult: i64 = center.iter().filter(|&&(j, _)| j == i).map(|&(_, m)| m).sum();
            let mut coords = c.coords.clone();
            coords.push(Rational::from(-mult));
            let mut nc = Curve { pa: m.arithmetic_genus(&coords), coords, flags: c.flags.clone(), boundary: c.boundary.clone() };
            nc.set_flag(CurveFlag::Exceptional, false);
            m.curves.push(nc);
        }
        let mut e = vec![Rational::zero(); n + 1];
        e[n] = Rational::one();
        let idx = m.push_curve(e, None);
        m.curves[idx].set_flag(CurveFlag::Exceptional, true);
        Ok(m)
    }

    /// Stored curves with `E² = −1`, `K·E = −1`, `p_a = 0`.
    pub fn find_minus_one_curves(&self) -> Vec<usize> {
        (0..self.curves.len())
            .filter(|&i| {
                let c = &self.curves[i].coords;
                self.self_intersection(c) == -Rational::one()
                    && self.k_dot(c) == -Rational::one()
                    && self.arithmetic_genus(c).is_zero()
            })
            .collect()
    }

    pub fn is_minus_one_class(&self, e: &[Rational]) -> bool {
        e.len() == self.rho() && self.self_intersection(e) == -Rational::one() && self.k_dot(e) == -Rational::one()
    }

    /// Contracts a (−1)-curve: classes map by `D ↦ D + (D·E)E` into `E^⊥`, expressed in a new basis.
    pub fn castelnuovo_contract(&self, e: &[Rational]) -> Result<SurfaceModel> {
        Ok(self.castelnuovo_contraction(e)?.0)
    }

    /// As `castelnuovo_contract`, also returning the push-forward `f_*` as an `(n−1)×n` matrix.
    pub fn castelnuovo_contraction(&self, e: &[Rational]) -> Result<(SurfaceModel, RationalMatrix)> {
        self.check_class(e)?;
        if !self.is_minus_one_class(e) {
            return Err(Error::NotMinusOneCurve);
        }
        if self.rho() == 1 {
            return Err(Error::Precondition("cannot contract on a Picard rank 1 surface".into()));
        }
        let n = self.rho();
        let project = |d: &[Rational]| -> Vec<Rational> {
            let t = self.dot(d, e);
            d.iter().zip(e).map(|(x, y)| x + &t * y).collect()
        };
        let unit = |i: usize| -> Vec<Rational> { (0..n).map(|j| Rational::from(i64::from(i == j))).collect() };

        let coordinate = (0..n).find(|&j| {
            e[j] == Rational::one()
                && (0..n).all(|i| i == j || e[i].is_zero())
                && (0..n).all(|i| i == j || self.gram.get(i, j).is_zero())
        });
        let (new_basis, labels): (Vec<Vec<Rational>>, Vec<String>) = if let Some(j) = coordinate {
            let keep: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            (keep.iter().map(|&i| unit(i)).collect(), keep.iter().map(|&i| self.basis[i].clone()).collect())
        } else if let Some(j) = (0..n).find(|&j| e[j].abs() == Rational::one()) {
            let keep: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            (
                keep.iter().map(|&i| project(&unit(i))).collect(),
                keep.iter().map(|&i| format!("{}'", self.basis[i])).collect(),
            )
        } else {
            let images: Vec<Vec<Rational>> = (0..n).map(|i| project(&unit(i))).collect();
            let den = crate::arith::rational::common_denominator(images.iter().flatten());
            let den_r = Rational::from(den.clone());
            let ints: Vec<Vec<i64>> = images
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| {
                            (x * &den_r)
                                .to_i64()
                                .ok_or_else(|| Error::Internal("projected basis overflow".into()))
                        })
                        .collect::<Result<Vec<i64>>>()
                })
                .collect::<Result<_>>()?;
            let h = hnf(&ints)?;
            let basis: Vec<Vec<Rational>> =
                h.iter().map(|r| r.iter().map(|&x| Rational::from(x) / &den_r).collect()).collect();
            let labels = (1..=basis.len()).map(|i| format!("L{i}")).collect();
            (basis, labels)
        };
        if new_basis.len() != n - 1 {
            return Err(Error::Internal("projected lattice has the wrong rank".into()));
        }
        // Coordinates of a class of E^⊥ in the new basis: solve Bᵀ y = x.
        let bt = RationalMatrix::from_rows(new_basis.clone())?.transpose();
        // Bᵀ is n×(n−1) of full column rank; drop a dependent row to make it square.
        let (_, pivots) = bt.transpose().rref();
        let inv = RationalMatrix::from_rows(pivots.iter().map(|&p| bt.row(p).to_vec()).collect())?.inverse()?;
        let coords_of = |x: &[Rational]| -> Result<Vec<Rational>> {
            let rhs: Vec<Rational> = pivots.iter().map(|&p| x[p].clone()).collect();
            let y = inv.mul_vec(&rhs);
            if bt.mul_vec(&y) != x {
                return Err(Error::Internal("class does not lie in the contracted lattice".into()));
            }
            Ok(y)
        };
        let mut gram = RationalMatrix::zeros(n - 1, n - 1);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                gram.set(i, j, self.dot(&new_basis[i], &new_basis[j]));
            }
        }
        let k = coords_of(&project(&self.k))?;
        let mut m = SurfaceModel { basis: labels, gram, k, curves: Vec::new(), ne_certified: self.ne_certified };
        for c in &self.curves {
            if c.coords == e {
                continue;
            }
            let coords = coords_of(&project(&c.coords))?;
            if coords.iter().all(Rational::is_zero) {
                continue;
            }
            let mut nc = Curve { pa: m.arithmetic_genus(&coords), coords, flags: c.flags.clone(), boundary: c.boundary.clone() };
            nc.set_flag(CurveFlag::Exceptional, false);
            m.curves.push(nc);
        }
        let mut push = RationalMatrix::zeros(n - 1, n);
        for i in 0..n {
            for (r, v) in coords_of(&project(&unit(i)))?.into_iter().enumerate() {
                push.set(r, i, v);
            }
        }
        Ok((m, push))
    }

    /// The `C² < 0` criterion; silent when `C² = 0`.
    pub fn extremal_ray_test(&self, c: &[Rational]) -> Result<ExtremalVerdict> {
        self.check_class(c)?;
        let c2 = self.self_intersection(c);
        Ok(if c2.is_negative() || self.rho() == 1 {
            ExtremalVerdict::Extremal
        } else if c2.is_positive() {
            ExtremalVerdict::NotExtremalUnlessRho1
        } else {
            ExtremalVerdict::Inconclusive
        })
    }

    /// Kleiman's criterion against the certified curve list.
    pub fn nef_ample_check(&self, d: &[Rational]) -> Result<NefVerdict> {
        self.check_class(d)?;
        if !self.ne_certified {
            return Err(Error::NotCertified);
        }
        let values: Vec<Rational> = self.curves.iter().map(|c| self.dot(d, &c.coords)).collect();
        if let Some((i, v)) = values.iter().enumerate().filter(|(_, v)| v.is_negative()).min_by(|a, b| a.1.cmp(b.1)) {
            return Ok(NefVerdict::NotNef { witness: i, value: v.clone() });
        }
        if let Some(i) = values.iter().position(Rational::is_zero) {
            return Ok(NefVerdict::NefNotAmple { zero_curve: i });
        }
        Ok(NefVerdict::Ample)
    }

    /// Extremal rays of the cone spanned by the stored curves, ordered by direction.
    pub fn extremal_rays(&self) -> Result<Vec<SurfaceRay>> {
        if !self.ne_certified {
            return Err(Error::NotCertified);
        }
        let mut groups: std::collections::BTreeMap<LatticeVector, Vec<usize>> = Default::default();
        for (i, c) in self.curves.iter().enumerate() {
            if c.coords.iter().all(Rational::is_zero) {
                continue;
            }
            groups.entry(primitive_on_ray(&c.coords)?).or_default().push(i);
        }
        let dirs: Vec<LatticeVector> = groups.keys().cloned().collect();
        let mut out = Vec::new();
        let dir_q: Vec<Vec<Rational>> = dirs.iter().map(LatticeVector::to_rationals).collect();
        let pairing = self.integer_pairing(&dirs);
        for (k, (dir, members)) in groups.into_iter().enumerate() {
            let d = &dir_q[k];
            let d2 = self.self_intersection(d);
            let meets_all = |k: usize| match &pairing {
                Some(gd) => (0..dirs.len()).all(|j| j == k || integer_dot(&gd[k], &dirs[j].0).is_some_and(|v| v >= 0)),
                None => dir_q.iter().enumerate().all(|(j, o)| j == k || !self.dot(d, o).is_negative()),
            };
            let extremal = if d2.is_negative() && meets_all(k) {
                // C = Σ a_j D_j with a_j ≥ 0 would give C² = Σ a_j C·D_j ≥ 0
                true
            } else if self.ne_certified && self.rho() >= 2 && d2.is_positive() {
                // C² > 0 puts C in the interior of the positive cone, which the Mori cone contains
                false
            } else if self.ne_certified && self.rho() >= 3 && d2.is_zero() {
                // the positive cone is round at C, so a polyhedral cone containing it is not pointed there
                false
            } else {
                let others: Vec<Vec<Rational>> =
                    dir_q.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| v.clone()).collect();
                !lp::in_cone(&others, d)
            };
            if !extremal {
                continue;
            }
            let j = dir.0.iter().position(|&x| x != 0).expect("nonzero");
            let scale = |i: usize| &self.curves[i].coords[j] / Rational::from(dir.0[j]);
            let representative =
                *members.iter().min_by(|&&a, &&b| scale(a).cmp(&scale(b)).then(a.cmp(&b))).unwrap();
            out.push(SurfaceRay {
                direction: dir,
                class: self.curves[representative].coords.clone(),
                representative,
                curves: members,
            });
        }
        Ok(out)
    }

    /// `L·G·v` for each `v`, with `L` clearing the denominators of the form; `None` on overflow.
    fn integer_pairing(&self, dirs: &[LatticeVector]) -> Option<Vec<Vec<i128>>> {
        let entries: Vec<&Rational> = (0..self.rho()).flat_map(|i| (0..self.rho()).map(move |j| (i, j))).map(|(i, j)| self.gram.get(i, j)).collect();
        let l = common_denominator(entries.iter().copied());
        let g: Vec<Vec<i128>> = (0..self.rho())
            .map(|i| {
                (0..self.rho())
                    .map(|j| (self.gram.get(i, j).clone() * Rational::from(l.clone())).to_i64().map(i128::from))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<_>>()?;
        dirs.iter()
            .map(|v| g.iter().map(|row| integer_dot(row, &v.0)).collect::<Option<Vec<_>>>())
            .collect()
    }

    /// `K²`.
    pub fn k_squared(&self) -> Rational {
        self.self_intersection(&self.k)
    }

    pub fn class_from_i64(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&x| Rational::from(x)).collect()
    }
}

fn integer_dot(a: &[i128], b: &[i64]) -> Option<i128> {
    a.iter().zip(b).try_fold(0i128, |acc, (&x, &y)| acc.checked_add(x.checked_mul(i128::from(y))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;

    fn c(v: &[i64]) -> Vec<Rational> {
        SurfaceModel::class_from_i64(v)
    }

    #[test]
    fn genus_by_adjunction() {
        let p2 = SurfaceModel::p2_blowup(0).unwrap();
        assert_eq!(p2.arithmetic_genus(&c(&[1])), q(0, 1));
        assert_eq!(p2.arithmetic_genus(&c(&[3])), q(1, 1));
        let x = SurfaceModel::p2_blowup(1).unwrap();
        assert_eq!(x.arithmetic_genus(&c(&[0, 1])), q(0, 1));
    }

    #[test]
    fn blow_up_line_and_nodal_cubic() {
        let p2 = SurfaceModel::p2_blowup_with(0, &[vec![1], vec![3]], false).unwrap();
        let y = p2.blow_up(&[(0, 1), (1, 2)]).unwrap();
        assert_eq!(y.rho(), 2);
        let line = &y.curves()[0];
        assert_eq!(y.self_intersection(&line.coords), q(0, 1));
        let cubic = &y.curves()[1];
        assert_eq!(cubic.coords, c(&[3, -2]));
        assert_eq!(cubic.pa, q(0, 1));
        assert!(y.curves()[2].has_flag(CurveFlag::Exceptional));
        assert_eq!(y.canonical(), c(&[-3, 1]).as_slice());
        let z = p2.blow_up(&[]).unwrap();
        assert_eq!(z.curves().len(), 3);
        assert!(p2.blow_up(&[(0, -1)]).is_err());
    }

    #[test]
    fn minus_one_curves() {
        assert_eq!(SurfaceModel::p2_blowup(1).unwrap().find_minus_one_curves(), vec![0]);
        assert!(SurfaceModel::p2_blowup(0).unwrap().find_minus_one_curves().is_empty());
        let x = SurfaceModel::p2_blowup_with(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]], true).unwrap();
        assert_eq!(x.find_minus_one_curves(), vec![0, 1, 2]);
    }

    #[test]
    fn contract_back_to_p2() {
        let x = SurfaceModel::p2_blowup(1).unwrap();
        assert_eq!(x.k_squared(), q(8, 1));
        let p2 = x.castelnuovo_contract(&c(&[0, 1])).unwrap();
        assert_eq!(p2.rho(), 1);
        assert_eq!(p2.k_squared(), q(9, 1));
        assert_eq!(p2.basis(), &["H".to_string()]);
        assert_eq!(p2.curves().len(), 1);
        assert_eq!(x.castelnuovo_contract(&c(&[1, -1])), Err(Error::NotMinusOneCurve));
    }

    #[test]
    fn contract_second_point() {
        let x2 = SurfaceModel::p2_blowup(2).unwrap();
        let x1 = x2.castelnuovo_contract(&c(&[0, 0, 1])).unwrap();
        assert_eq!(x1.gram(), SurfaceModel::p2_blowup(1).unwrap().gram());
        assert_eq!(x1.canonical(), SurfaceModel::p2_blowup(1).unwrap().canonical());
        assert!(x2.castelnuovo_contract(&c(&[1, 0, 0])).is_err());
    }

    #[test]
    fn contract_line_gives_quadric() {
        let x2 = SurfaceModel::p2_blowup(2).unwrap();
        let q1 = x2.castelnuovo_contract(&c(&[1, -1, -1])).unwrap();
        assert_eq!(q1.rho(), 2);
        assert_eq!(q1.k_squared(), q(8, 1));
        // even lattice: every class has even square
        for i in 0..2 {
            assert_eq!(q1.gram().get(i, i).numer() % 2, 0.into());
        }
    }

    #[test]
    fn extremal_and_nef() {
        let x = SurfaceModel::p2_blowup(1).unwrap();
        assert_eq!(x.extremal_ray_test(&c(&[0, 1])).unwrap(), ExtremalVerdict::Extremal);
        assert_eq!(x.extremal_ray_test(&c(&[1, 0])).unwrap(), ExtremalVerdict::NotExtremalUnlessRho1);
        assert_eq!(x.extremal_ray_test(&c(&[1, -1])).unwrap(), ExtremalVerdict::Inconclusive);
        assert_eq!(x.nef_ample_check(&c(&[3, -1])).unwrap(), NefVerdict::Ample);
        assert_eq!(x.nef_ample_check(&c(&[1, -1])).unwrap(), NefVerdict::NefNotAmple { zero_curve: 1 });
        assert_eq!(x.nef_ample_check(&c(&[0, 1])).unwrap(), NefVerdict::NotNef { witness: 0, value: q(-1, 1) });
        let uncertified = SurfaceModel::p2_blowup_with(1, &[vec![0, 1]], false).unwrap();
        assert_eq!(uncertified.nef_ample_check(&c(&[1, 0])), Err(Error::NotCertified));
    }

    #[test]
    fn rejects_bad_models() {
        let bad_sig = SurfaceModel::new(
            vec!["A".into(), "B".into()],
            RationalMatrix::from_i64_rows(&[vec![1, 0], vec![0, 1]]).unwrap(),
            c(&[0, 0]),
            vec![],
            false,
        );
        assert!(bad_sig.is_err());
        let bad_pa = SurfaceModel::new(
            vec!["H".into()],
            RationalMatrix::from_i64_rows(&[vec![1]]).unwrap(),
            c(&[-3]),
            vec![Curve { coords: c(&[1]), pa: q(1, 1), flags: vec![], boundary: None }],
            false,
        );
        assert!(matches!(bad_pa, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn json_round_trip() {
        let x = SurfaceModel::p2_blowup(1).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains(r#""K":["-3","1"]"#));
        let back: SurfaceModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
