#pragma once

// Named fixtures shared by the test suite and the experiment runner.

#include <string>
#include <vector>

#include "ellreg/grid.hpp"
#include "ellreg/pdo.hpp"

namespace ellreg {

/// A one-dimensional mollifier-convergence fixture: operator, datum and the
/// a.e. values of Pf on the measurement window |x| <= L/4. Every datum is
/// windowed by soft_plateau(|x|, 1.6, 0.17), which is 1 to round-off there.
struct ConvergenceCase {
    std::string label;
    PDOperator P;
    Field f;
    Field reference;
};

/// "order-0", "order-1", "order-2-regular", "order-2-rough"
const std::vector<std::string>& convergence_case_names();
ConvergenceCase convergence_case(const std::string& name, const GridSpec& grid);
Box convergence_window(const GridSpec& grid);

/// (x1^4 + x1 x2^3) under a soft radial plateau in two dimensions, x^4 in one.
Field windowed_quartic(const GridSpec& grid);

} // namespace ellreg
