use rand::Rng;

use super::{PolymerPath, TransitionField, TransitionSource};
use crate::env::{Site, E1, E2};
use crate::error::{Error, Result};

/// Draw a path from `Q_{x,y}` by running the backward chain from `y` down to
/// the anchor `x` and reversing.
pub fn sample_p2p<R: Rng + ?Sized>(backward: &TransitionField, y: Site, rng: &mut R) -> Result<PolymerPath> {
    let TransitionSource::Backward { anchor: x } = *backward.source() else {
        return Err(Error::param("sample_p2p needs backward transitions"));
    };
    if !(x <= y) {
        return Err(Error::Domain {
            site: y,
            anchor: x,
            reason: "target must dominate the anchor",
        });
    }
    backward.p(y)?;
    let mut sites = Vec::with_capacity((y.level() - x.level()) as usize + 1);
    let mut u = y;
    sites.push(u);
    while u != x {
        let p = backward.p_at(u);
        u = if rng.random::<f64>() < p { u - E1 } else { u - E2 };
        sites.push(u);
    }
    sites.reverse();
    Ok(PolymerPath::from_sites_unchecked(sites))
}

/// A forward-chain path with the transition provenance it was drawn from.
#[derive(Clone, Debug)]
pub struct ChainSample {
    pub path: PolymerPath,
    /// The chain tried to leave the transition window before `steps` moves.
    pub truncated: bool,
    pub source: TransitionSource,
}

/// Run the forward chain `y → y + e_i` from `x` for `steps` moves.
pub fn forward_chain_sample<R: Rng + ?Sized>(
    forward: &TransitionField,
    x: Site,
    steps: usize,
    rng: &mut R,
) -> Result<ChainSample> {
    if matches!(forward.source(), TransitionSource::Backward { .. }) {
        return Err(Error::param("forward_chain_sample needs forward transitions"));
    }
    forward.p(x)?;
    let w = *forward.window();
    let mut sites = Vec::with_capacity(steps + 1);
    sites.push(x);
    let mut y = x;
    let mut truncated = false;
    for _ in 0..steps {
        if !w.contains(y) {
            truncated = true;
            break;
        }
        let p = forward.p_at(y);
        y = if rng.random::<f64>() < p { y + E1 } else { y + E2 };
        sites.push(y);
    }
    Ok(ChainSample {
        path: PolymerPath::from_sites_unchecked(sites),
        truncated,
        source: forward.source().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::rng::{replica_rng, stream};
    use crate::env::{WeightField, Window};
    use crate::gibbs::backward_transitions;
    use crate::partition::{p2p_table, Beta, Mode};

    #[test]
    fn one_step_target_is_deterministic() {
        let f = WeightField::from_values(Window::square(2), vec![1.0, 5.0, 2.0, 3.0]).unwrap();
        let t = p2p_table(&f, Site::new(0, 0), Window::square(2), Beta::ONE, Mode::FromAnchor).unwrap();
        let tr = backward_transitions(&t, &f).unwrap();
        let mut rng = replica_rng(1, stream::SAMPLER, 0);
        let p = sample_p2p(&tr, Site::new(1, 0), &mut rng).unwrap();
        assert_eq!(p.sites(), &[Site::new(0, 0), Site::new(1, 0)]);
        assert!(sample_p2p(&tr, Site::new(-1, 0), &mut rng).is_err());
    }

    #[test]
    fn degenerate_field_gives_e1_ray() {
        let tr = TransitionField::constant(Window::square(10), 1.0).unwrap();
        let mut rng = replica_rng(1, stream::SAMPLER, 0);
        let s = forward_chain_sample(&tr, Site::new(0, 3), 6, &mut rng).unwrap();
        assert!(!s.truncated);
        assert_eq!(s.path.end(), Site::new(6, 3));
        let s = forward_chain_sample(&tr, Site::new(0, 3), 30, &mut rng).unwrap();
        assert!(s.truncated);
        assert_eq!(s.path.end(), Site::new(10, 3));
    }
}
