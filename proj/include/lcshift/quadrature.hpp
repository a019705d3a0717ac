#pragma once

#include <functional>

namespace lcshift::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 60;
};

// Adaptive Gauss-Kronrod (G7, K15) on a finite interval. The error estimate
// per panel is |K15 - G7|; panels split until the local estimate fits within
// its share of the requested tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

} // namespace lcshift::quad
