//! The uniform measure `M_q(λ) = (q;q)_∞ q^{|λ|}` on all partitions.

pub mod expected;
pub mod frobenius;
pub mod limit;
pub mod npoint;
pub mod sampler;
pub mod theta;

pub use expected::{expected_size, sigma1, ExpectedSize};
pub use frobenius::{frobenius_corr_enum, frobenius_corr_enum_many, frobenius_corr_integral};
pub use limit::{bulk_limit, vershik};
pub use npoint::{npoint_direct, npoint_theta, qdiff_residual, NPointRequest, NPointValue};
pub use sampler::{sample, sample_many, SampleStream, UniformSampler};
pub use theta::{qpochhammer, theta11, theta11_product, theta3, theta3_product, theta_deriv, ThetaContext};
