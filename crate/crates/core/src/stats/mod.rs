//! Level statistics: unfolding, nearest-neighbour spacings, spacing ratios,
//! histograms, reference distributions and fits.

mod fit;
mod histogram;
mod neighbors;
mod reference;
mod unfold;

pub use fit::{
    brody_fit, brody_fit_histogram, mixture_fit, BrodyFit, FitMethod, MixtureFit, DEFAULT_BINS,
    DEFAULT_S_MAX, MIN_MLE_SAMPLES,
};
pub use histogram::{histogram_density, Histogram};
pub use neighbors::{k_nearest, nn_distances, NeighborSearch, PointSet, GRID_THRESHOLD};
pub use reference::{brody_c1, brody_c2, ks_distance, ks_two_sample, Reference};
pub use unfold::{
    mean_and_stderr, nn_spacings, nn_spacings_with, spacing_ratios, spacing_ratios_with,
    unfold_complex, unfold_real, RatioSample, SourceKind, SpacingSample, UnfoldedPoints,
    MIN_PER_SPECTRUM,
};
