use rand::Rng;

use crate::chankit::{twirl, KrausChannel, TwirlSampling};
use crate::error::Result;
use crate::numkit::random::isometry;
use crate::numkit::{CMat, ToleranceConfig};
use crate::repkit::RepPair;
use crate::scalar::Real;

/// Group elements that make twirls exact: the cyclic torus grid times the components.
pub(crate) fn exact_elements<T: Real>(pair: &RepPair<T>) -> Result<Vec<(CMat<T>, CMat<T>)>> {
    crate::chankit::cyclic_grid(pair)
}

/// Random Kraus set of 2–4 operators d_in → d_out, split into the operator list.
pub(crate) fn random_kraus<T: Real, R: Rng>(din: usize, dout: usize, rng: &mut R) -> Vec<CMat<T>> {
    let r = rng.random_range(2..=4);
    let v = isometry::<T, R>(dout * r, din, rng);
    (0..r).map(|k| v.rows(k * dout, dout).into_owned()).collect()
}

/// (untwirled, twirled) pair of a seeded random channel.
pub(crate) fn random_covariant_channel<T: Real, R: Rng>(
    pair: &RepPair<T>,
    elements: &[(CMat<T>, CMat<T>)],
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<(KrausChannel<T>, KrausChannel<T>)> {
    let raw = KrausChannel::new(random_kraus(pair.rep_in.dim(), pair.rep_out.dim(), rng), tol)?;
    let tw = twirl(&raw, pair, &TwirlSampling::Finite(elements.to_vec()), tol)?.channel;
    Ok((raw, tw))
}

/// Two covariant CP maps summing to a channel: the Kraus set of a random channel split in
/// two groups, each twirled.
pub(crate) fn random_covariant_instrument<T: Real, R: Rng>(
    pair: &RepPair<T>,
    elements: &[(CMat<T>, CMat<T>)],
    rng: &mut R,
) -> Result<[Vec<CMat<T>>; 2]> {
    let ops = random_kraus::<T, R>(pair.rep_in.dim(), pair.rep_out.dim(), rng);
    let cut = rng.random_range(1..ops.len());
    Ok([
        crate::chankit::twirl_kraus(&ops[..cut], elements)?,
        crate::chankit::twirl_kraus(&ops[cut..], elements)?,
    ])
}
