#pragma once

#include <vector>

#include "ellreg/grid.hpp"
#include "ellreg/pdo.hpp"

namespace ellreg {

/// Lattice partition of unity psi_j = chi_j / sum_i chi_i built from translates
/// chi_j(x) = chi0(x - delta j / 2) of a tensor-product plateau chi0 that is 1
/// on [-delta/2, delta/2]^m and vanishes outside (-delta, delta)^m.
struct PartitionSpec {
    GridSpec grid;
    double delta = 0.0;
    int per_axis = 0;                      ///< translates per axis, 4L/delta
    std::vector<std::vector<int>> lattice; ///< translate index j per patch
    Field chi0;
    Field chi_sum;
    std::vector<Field> psi;

    std::size_t patches() const { return psi.size(); }
    std::vector<double> centre(std::size_t patch) const;
    /// Largest number of patches whose psi is nonzero at a single grid point.
    int max_overlap() const;
    /// For each patch j, the patches whose support meets supp psi_j.
    std::vector<std::vector<std::size_t>> neighbours() const;
};

/// One-dimensional plateau profile used for chi0.
double partition_profile(double s, double delta);

/// Throws IncommensurableDelta unless delta divides the period 2L.
PartitionSpec build_partition(const GridSpec& grid, double delta);

/// (sum_j ||psi_j f||_{B^beta_{p,p}}^p)^{1/p}, or the max when p = kInf.
double patch_norm(const Field& f, const PartitionSpec& part, double beta, double p);

namespace serial {
double patch_norm(const Field& f, const PartitionSpec& part, double beta, double p);
}

/// Q_j = [Q, psi_j] for every patch.
std::vector<PDOperator> patch_commutators(const PDOperator& Q, const PartitionSpec& part);

} // namespace ellreg
