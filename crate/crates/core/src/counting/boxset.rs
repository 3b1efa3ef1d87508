//! Finite disjoint unions of half-open boxes, closed under intersection and
//! difference. Volumes are exact sums of products.

type HalfOpen = (Vec<f64>, Vec<f64>);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoxSet {
    boxes: Vec<HalfOpen>,
}

fn is_empty(b: &HalfOpen) -> bool {
    b.0.iter().zip(&b.1).any(|(a, c)| a >= c)
}

fn intersect(a: &HalfOpen, b: &HalfOpen) -> HalfOpen {
    let lo = a.0.iter().zip(&b.0).map(|(x, y)| x.max(*y)).collect();
    let hi = a.1.iter().zip(&b.1).map(|(x, y)| x.min(*y)).collect();
    (lo, hi)
}

/// `a ∖ b` as at most `2m` disjoint boxes, peeling one axis at a time.
fn subtract(a: &HalfOpen, b: &HalfOpen) -> Vec<HalfOpen> {
    let cut = intersect(a, b);
    if is_empty(&cut) {
        return vec![a.clone()];
    }
    let mut out = Vec::new();
    let mut rest = a.clone();
    for k in 0..a.0.len() {
        if rest.0[k] < cut.0[k] {
            let mut below = rest.clone();
            below.1[k] = cut.0[k];
            out.push(below);
            rest.0[k] = cut.0[k];
        }
        if cut.1[k] < rest.1[k] {
            let mut above = rest.clone();
            above.0[k] = cut.1[k];
            out.push(above);
            rest.1[k] = cut.1[k];
        }
    }
    out
}

impl BoxSet {
    /// The pieces must be pairwise disjoint.
    pub fn from_disjoint(boxes: Vec<HalfOpen>) -> Self {
        Self { boxes: boxes.into_iter().filter(|b| !is_empty(b)).collect() }
    }

    pub fn single(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self::from_disjoint(vec![(lo, hi)])
    }

    pub fn boxes(&self) -> &[HalfOpen] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.boxes.iter().map(|(lo, hi)| lo.iter().zip(hi).map(|(a, b)| b - a).product::<f64>()).sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|(lo, hi)| x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v < b))
    }

    pub fn intersection(&self, other: &BoxSet) -> BoxSet {
        let mut out = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                let c = intersect(a, b);
                if !is_empty(&c) {
                    out.push(c);
                }
            }
        }
        BoxSet { boxes: out }
    }

    pub fn difference(&self, other: &BoxSet) -> BoxSet {
        let mut current = self.boxes.clone();
        for b in &other.boxes {
            current = current.iter().flat_map(|a| subtract(a, b)).filter(|p| !is_empty(p)).collect();
        }
        BoxSet { boxes: current }
    }

    pub fn translated(&self, v: &[f64]) -> BoxSet {
        let shift = |p: &Vec<f64>| p.iter().zip(v).map(|(a, b)| a + b).collect();
        BoxSet { boxes: self.boxes.iter().map(|(lo, hi)| (shift(lo), shift(hi))).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_arithmetic() {
        let a = BoxSet::single(vec![0.0], vec![1.0]);
        let b = a.translated(&[0.3]);
        assert!((a.intersection(&b).volume() - 0.7).abs() < 1e-15);
        assert!((a.difference(&b).volume() - 0.3).abs() < 1e-15);
        assert!(a.difference(&a).is_empty());
    }

    #[test]
    fn membership_matches_set_algebra() {
        let a = BoxSet::single(vec![0.0, 0.0], vec![1.0, 1.0]);
        let b = BoxSet::single(vec![0.25, -1.0], vec![0.5, 0.75]);
        let c = BoxSet::single(vec![0.6, 0.6], vec![2.0, 2.0]);
        let d = a.difference(&b).difference(&c);
        let e = a.intersection(&b);
        let mut hits = 0;
        let n = 200;
        for i in 0..n {
            for j in 0..n {
                let x = [(i as f64 + 0.5) / n as f64 * 1.2 - 0.1, (j as f64 + 0.5) / n as f64 * 1.2 - 0.1];
                let want = a.contains(&x) && !b.contains(&x) && !c.contains(&x);
                assert_eq!(d.contains(&x), want);
                assert_eq!(e.contains(&x), a.contains(&x) && b.contains(&x));
                hits += want as usize;
            }
        }
        let want = 1.0 - 0.25 * 0.75 - 0.4 * 0.4;
        assert!((d.volume() - want).abs() < 1e-12);
        assert!((hits as f64 * (1.2f64 / n as f64).powi(2) - want).abs() < 0.02);
    }
}
