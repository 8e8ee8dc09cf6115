// kernels_impl.hpp — per-ISA entry points wired into the dispatch table
#pragma once

#include "corrnoise/kernels.hpp"

namespace corrnoise::kernels {

namespace scalar {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void cmul_acc(std::size_t n, const cplx* w, const cplx* x, cplx* y);
void cxpay(std::size_t n, const cplx* x, cplx a, const cplx* y, cplx* out);
cplx filon_sum(const PanelView& p, double t, double nu);
} // namespace scalar

namespace avx2 {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void cmul_acc(std::size_t n, const cplx* w, const cplx* x, cplx* y);
void cxpay(std::size_t n, const cplx* x, cplx a, const cplx* y, cplx* out);
cplx filon_sum(const PanelView& p, double t, double nu);
} // namespace avx2

} // namespace corrnoise::kernels
