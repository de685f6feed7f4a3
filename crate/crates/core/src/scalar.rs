//! Floating-point scalar abstraction.
//!
//! Everything numeric in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The trait adds a dense GEMM hook on top of
//! `num_traits::Float` so matrix products dispatch to a packed kernel for the
//! concrete type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Strided view of a row-major or transposed operand for [`Real::gemm`].
#[derive(Debug, Clone, Copy)]
pub struct Strides {
    pub row: isize,
    pub col: isize,
}

impl Strides {
    /// Strides of a row-major `rows x cols` buffer, optionally read transposed.
    pub fn row_major(cols: usize, transposed: bool) -> Self {
        if transposed {
            Strides { row: 1, col: cols as isize }
        } else {
            Strides { row: cols as isize, col: 1 }
        }
    }
}

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Short type name written into run metadata and serialized networks.
    const NAME: &'static str;
    /// Width in bytes of the little-endian encoding.
    const BYTES: usize;

    /// `c <- alpha * a * b + beta * c` where `a` is `m x k` and `b` is `k x n`.
    ///
    /// Operand layouts are described by `Strides`; the slices are bounds-checked
    /// against the largest offset each layout touches before the kernel runs.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: &[Self],
        sa: Strides,
        b: &[Self],
        sb: Strides,
        beta: Self,
        c: &mut [Self],
        sc: Strides,
    );

    fn to_le_bytes_vec(self, out: &mut Vec<u8>);
    fn from_le_slice(bytes: &[u8]) -> Self;

    /// Converts an `f64` literal. Panics only if the value is unrepresentable,
    /// which cannot happen for finite inputs with `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }
}

fn max_offset(rows: usize, cols: usize, s: Strides) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    (rows - 1) * s.row as usize + (cols - 1) * s.col as usize
}

fn check_extent<T>(buf: &[T], rows: usize, cols: usize, s: Strides) {
    assert!(s.row >= 0 && s.col >= 0, "negative strides are not supported");
    if rows > 0 && cols > 0 {
        assert!(
            max_offset(rows, cols, s) < buf.len(),
            "gemm operand too small: {}x{} with strides ({}, {}) over {} elements",
            rows,
            cols,
            s.row,
            s.col,
            buf.len()
        );
    }
}

macro_rules! impl_real {
    ($t:ty, $kernel:path, $bytes:expr) => {
        impl Real for $t {
            const NAME: &'static str = stringify!($t);
            const BYTES: usize = $bytes;

            fn gemm(
                m: usize,
                k: usize,
                n: usize,
                alpha: Self,
                a: &[Self],
                sa: Strides,
                b: &[Self],
                sb: Strides,
                beta: Self,
                c: &mut [Self],
                sc: Strides,
            ) {
                check_extent(a, m, k, sa);
                check_extent(b, k, n, sb);
                check_extent(c, m, n, sc);
                if m == 0 || n == 0 {
                    return;
                }
                // SAFETY: every offset the kernel touches was bounds-checked above,
                // and `c` is uniquely borrowed.
                unsafe {
                    $kernel(
                        m,
                        k,
                        n,
                        alpha,
                        a.as_ptr(),
                        sa.row,
                        sa.col,
                        b.as_ptr(),
                        sb.row,
                        sb.col,
                        beta,
                        c.as_mut_ptr(),
                        sc.row,
                        sc.col,
                    );
                }
            }

            fn to_le_bytes_vec(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_le_bytes());
            }

            fn from_le_slice(bytes: &[u8]) -> Self {
                let mut raw = [0u8; $bytes];
                raw.copy_from_slice(&bytes[..$bytes]);
                <$t>::from_le_bytes(raw)
            }
        }
    };
}

impl_real!(f64, matrixmultiply::dgemm, 8);
impl_real!(f32, matrixmultiply::sgemm, 4);
