#pragma once

#include "striplab/numeric.hpp"

// Spectral transform on the symmetric grid t_j = -R + j*h, h = 2R/N (N even).
// Coefficients are defined by  f(t_j) = sum_m c_m exp(i xi_m t_j)  with
// xi_m = pi*mtilde/R and mtilde the signed FFT-natural index (m < N/2 -> m,
// else m - N).  Relative to a plain DFT this inserts the (-1)^m phase that
// accounts for the grid starting at -R instead of 0.

namespace striplab::fft {

// signed frequency of FFT bin m
double frequency(int m, int n, double half_length);

// values (length n) -> coefficients (length n)
void spectrum(const cplx* values, cplx* coeffs, int n);
// coefficients -> values
void grid_values(const cplx* coeffs, cplx* values, int n);

VecC spectrum(const VecC& values);
VecC grid_values(const VecC& coeffs);

// column-wise transforms for sample-major (n x d) data
MatC spectrum_columns(const MatC& values);
MatC grid_values_columns(const MatC& coeffs);

// raw unnormalized DFTs (FFTW sign convention), for plain convolution work
void dft_forward(const cplx* in, cplx* out, int n);
void dft_backward(const cplx* in, cplx* out, int n);

}  // namespace striplab::fft
