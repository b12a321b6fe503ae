#pragma once

// Data-parallel inner loops. Every kernel comes in a serial and an OpenMP
// flavor selected by Exec; both compute each output element independently and
// in the same order, so results are bit-identical across thread counts.

#include <omp.h>

#include <vector>

#include "egolearn/core.hpp"

namespace egolearn {

enum class Exec { serial, parallel };

template <typename F>
void parallel_for(int n, Exec exec, F&& f) {
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) f(i);
    } else {
        for (int i = 0; i < n; ++i) f(i);
    }
}

// ---------------------------------------------------------------------------
// Image kernels
// ---------------------------------------------------------------------------

// normalized taps for a gaussian truncated at +-ceil(3*sigma)
std::vector<float> gaussian_taps(double sigma);

// separable gaussian, clamp-to-edge borders
Image gaussian_blur(const Image& src, double sigma, Exec exec = Exec::parallel);

// per-pixel blend between consecutive blur levels; level(p) is supplied by the
// caller as a callable (pixel x, y) -> continuous level in [0, levels-1]
using LevelFn = double (*)(int x, int y, const void* ctx);
Image blend_levels(const std::vector<Image>& levels, LevelFn level_fn, const void* ctx,
                   Exec exec = Exec::parallel);

// bilinear resampling with half-pixel centers
Image resize_bilinear(const Image& src, int out_w, int out_h, Exec exec = Exec::parallel);

// mean absolute 4-neighbor laplacian over a pixel predicate; used by tests
// and the acuity analysis helpers
double mean_abs_laplacian(const Image& img, int x0, int y0, int x1, int y1);

// ---------------------------------------------------------------------------
// Convolution kernels (templated so tests can instantiate in double)
// ---------------------------------------------------------------------------
// Tensors are dense row-major: x[C][H][W], w[Cout][Cin][3][3], y[Cout][Ho][Wo].
// 3x3 kernel, stride 2, zero padding 1.

inline int conv_out_dim(int in) { return (in - 1) / 2 + 1; }

template <typename T>
void conv3x3s2_forward(const T* x, int cin, int h, int w, const T* wgt, const T* bias,
                       int cout, T* y, Exec exec) {
    const int ho = conv_out_dim(h), wo = conv_out_dim(w);
    parallel_for(cout, exec, [&](int co) {
        T* yplane = y + static_cast<size_t>(co) * ho * wo;
        for (int i = 0; i < ho * wo; ++i) yplane[i] = bias[co];
        for (int ci = 0; ci < cin; ++ci) {
            const T* xplane = x + static_cast<size_t>(ci) * h * w;
            const T* wk = wgt + ((static_cast<size_t>(co) * cin + ci) * 9);
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const T wv = wk[ky * 3 + kx];
                    for (int oy = 0; oy < ho; ++oy) {
                        const int iy = 2 * oy + ky - 1;
                        if (iy < 0 || iy >= h) continue;
                        const T* xrow = xplane + static_cast<size_t>(iy) * w;
                        T* yrow = yplane + static_cast<size_t>(oy) * wo;
                        const int ox_lo = (kx == 0) ? 1 : 0;
                        const int ox_hi = (2 * (wo - 1) + kx - 1 < w) ? wo : wo - 1;
                        for (int ox = ox_lo; ox < ox_hi; ++ox)
                            yrow[ox] += wv * xrow[2 * ox + kx - 1];
                    }
                }
            }
        }
    });
}

// gradients wrt weights and bias; accumulates into dw/db
template <typename T>
void conv3x3s2_backward_params(const T* x, int cin, int h, int w, const T* dy, int cout,
                               T* dw, T* db, Exec exec) {
    const int ho = conv_out_dim(h), wo = conv_out_dim(w);
    parallel_for(cout, exec, [&](int co) {
        const T* dyplane = dy + static_cast<size_t>(co) * ho * wo;
        T acc_b = T(0);
        for (int i = 0; i < ho * wo; ++i) acc_b += dyplane[i];
        db[co] += acc_b;
        for (int ci = 0; ci < cin; ++ci) {
            const T* xplane = x + static_cast<size_t>(ci) * h * w;
            T* dwk = dw + ((static_cast<size_t>(co) * cin + ci) * 9);
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    T acc = T(0);
                    for (int oy = 0; oy < ho; ++oy) {
                        const int iy = 2 * oy + ky - 1;
                        if (iy < 0 || iy >= h) continue;
                        const T* xrow = xplane + static_cast<size_t>(iy) * w;
                        const T* dyrow = dyplane + static_cast<size_t>(oy) * wo;
                        const int ox_lo = (kx == 0) ? 1 : 0;
                        const int ox_hi = (2 * (wo - 1) + kx - 1 < w) ? wo : wo - 1;
                        for (int ox = ox_lo; ox < ox_hi; ++ox)
                            acc += dyrow[ox] * xrow[2 * ox + kx - 1];
                    }
                    dwk[ky * 3 + kx] += acc;
                }
            }
        }
    });
}

// gradient wrt input; accumulates into dx
template <typename T>
void conv3x3s2_backward_input(const T* wgt, int cin, int h, int w, const T* dy, int cout,
                              T* dx, Exec exec) {
    const int ho = conv_out_dim(h), wo = conv_out_dim(w);
    parallel_for(cin, exec, [&](int ci) {
        T* dxplane = dx + static_cast<size_t>(ci) * h * w;
        for (int co = 0; co < cout; ++co) {
            const T* dyplane = dy + static_cast<size_t>(co) * ho * wo;
            const T* wk = wgt + ((static_cast<size_t>(co) * cin + ci) * 9);
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const T wv = wk[ky * 3 + kx];
                    for (int oy = 0; oy < ho; ++oy) {
                        const int iy = 2 * oy + ky - 1;
                        if (iy < 0 || iy >= h) continue;
                        T* dxrow = dxplane + static_cast<size_t>(iy) * w;
                        const T* dyrow = dyplane + static_cast<size_t>(oy) * wo;
                        const int ox_lo = (kx == 0) ? 1 : 0;
                        const int ox_hi = (2 * (wo - 1) + kx - 1 < w) ? wo : wo - 1;
                        for (int ox = ox_lo; ox < ox_hi; ++ox)
                            dxrow[2 * ox + kx - 1] += wv * dyrow[ox];
                    }
                }
            }
        }
    });
}

// 2x2 average pooling, stride 2 (input dims must be even)
template <typename T>
void avgpool2_forward(const T* x, int c, int h, int w, T* y, Exec exec) {
    const int ho = h / 2, wo = w / 2;
    parallel_for(c, exec, [&](int ci) {
        const T* xplane = x + static_cast<size_t>(ci) * h * w;
        T* yplane = y + static_cast<size_t>(ci) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
            const T* r0 = xplane + static_cast<size_t>(2 * oy) * w;
            const T* r1 = r0 + w;
            T* yrow = yplane + static_cast<size_t>(oy) * wo;
            for (int ox = 0; ox < wo; ++ox)
                yrow[ox] = (r0[2 * ox] + r0[2 * ox + 1] + r1[2 * ox] + r1[2 * ox + 1]) * T(0.25);
        }
    });
}

template <typename T>
void avgpool2_backward(const T* dy, int c, int h, int w, T* dx, Exec exec) {
    const int ho = h / 2, wo = w / 2;
    parallel_for(c, exec, [&](int ci) {
        const T* dyplane = dy + static_cast<size_t>(ci) * ho * wo;
        T* dxplane = dx + static_cast<size_t>(ci) * h * w;
        for (int oy = 0; oy < ho; ++oy) {
            const T* dyrow = dyplane + static_cast<size_t>(oy) * wo;
            T* r0 = dxplane + static_cast<size_t>(2 * oy) * w;
            T* r1 = r0 + w;
            for (int ox = 0; ox < wo; ++ox) {
                const T g = dyrow[ox] * T(0.25);
                r0[2 * ox] += g;
                r0[2 * ox + 1] += g;
                r1[2 * ox] += g;
                r1[2 * ox + 1] += g;
            }
        }
    });
}

}  // namespace egolearn
