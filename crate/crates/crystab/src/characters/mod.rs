//! Smooth and continuous characters of `Q_p^×`, Gauss sums, and the
//! constants attached to a pair of smooth characters.

mod continuous;
mod gauss;
mod pair;
mod smooth;

pub use continuous::ContinuousCharacter;
pub use gauss::gauss_sum;
pub use pair::{essential_conductor, intertwining_constant, CharacterPair};
pub use smooth::{log_index, primitive_root, CharValue, SmoothCharacter};
