#pragma once

#include <functional>
#include <vector>

#include "ibflow/stencil.hpp"
#include "ibflow/types.hpp"

namespace ibflow {

/// Total-degree monomial basis in 3 variables, graded order, constant first.
struct PolyBasis {
    explicit PolyBasis(int degree);
    int degree;
    std::vector<std::array<int, 3>> monomials;
    int n_coeffs() const { return static_cast<int>(monomials.size()); }
    static int n_coeffs(int p) { return (p + 1) * (p + 2) * (p + 3) / 6; }
};

/// Row vector of the basis evaluated at x (raw coordinates).
VecX eval_basis(int degree, const Vec3& x);

/// Observation weights. Entry 0 is the IB point (weight 1 by convention);
/// cell and boundary observations get w = 1 / (1 + (d/d0)^2) with d the
/// anisotropic distance to the IB point and d0 the nearest observation's.
VecX compute_weights(const Stencil& stencil, const PrincipalDirections& pd);

/// One weighted least-squares design: beta = M * values. The basis is
/// centred at `centre` and scaled by `scale` for conditioning; evaluation
/// helpers below undo the mapping.
struct WlsFit {
    int requested_degree = 0;
    int effective_degree = 0;    // after any reduction
    double condition = 1.0;      // R-diagonal ratio of the kept columns
    bool rank_deficient = false; // solved in a subspace (degenerate directions)
    Vec3 centre = Vec3::Zero();
    double scale = 1.0;
    MatX coeff_map;              // n_coeffs x n_obs, beta* = coeff_map * values
    VecX beta;                   // populated when values were supplied

    double evaluate(const Vec3& x) const;
    VecX evaluate_map(const Vec3& x) const; // row of coefficients over observations
};

/// Design only (no values): observation points, weights -> coefficient map.
WlsFit wls_design(int degree, const std::vector<Vec3>& points, const VecX& weights,
                  const Vec3& centre, double scale);

/// Full fit per the WLS problem argmin |W^(1/2)(U - A beta)|^2.
WlsFit fit_wls(int degree, const std::vector<Vec3>& points, const VecX& values,
               const VecX& weights, const Vec3& centre, double scale);

// ---------------- interpolation operator ----------------

/// Reference of one observation slot in the datum/field layout.
struct ObsRef {
    enum class Kind { OwnDatum, Cell, ExtraDatum };
    Kind kind = Kind::Cell;
    int index = -1; // cell id, or extra-datum slot
};

/// Linear correction operator U_corr = S_g g + S U. Fluid rows of S are
/// identity; solid rows inject the datum; IB rows hold the WLS combination.
/// The datum vector g has one slot per cell plus one per enrichment point.
struct InterpOperator {
    int n_cells = 0;
    int n_extra = 0;
    int degree = 0;
    SpMat S;   // n_cells x n_cells
    SpMat Sg;  // n_cells x (n_cells + n_extra)

    struct CellContext {
        int cell = -1;
        WlsFit fit;
        std::vector<ObsRef> obs;
        Vec3 ib_point = Vec3::Zero();
        Vec3 cell_centre = Vec3::Zero();

        /// beta for one concrete field/datum pair.
        VecX beta_for(const InterpOperator& op, const VecX& g, const VecX& U) const;
    };
    std::vector<CellContext> contexts; // one per IB cell, ascending cell id
    std::vector<int> ib_cells;

    int datum_size() const { return n_cells + n_extra; }
};

/// Assemble the operator from per-IB-cell stencils. Fits are computed here
/// (design only); degree reduction and in-plane rank handling are recorded
/// per cell.
InterpOperator build_interp_operator(const Mesh& mesh, const Classification& cls,
                                     const std::vector<Stencil>& stencils, int degree);

/// S_g g + S U.
VecX correct_field(const InterpOperator& op, const VecX& g, const VecX& U);

/// Per-cell replay of the correction at one IB cell (oracle-style path).
double replay_correction(const InterpOperator& op, const InterpOperator::CellContext& ctx,
                         const VecX& g, const VecX& U);

struct SurfaceSample {
    Vec3 point = Vec3::Zero();
    double value = 0.0;
    int owner = -1;       // owning IB cell, -1 if unassigned
    bool assigned = false;
};

/// Evaluate each owning IB cell's fitted polynomial at on-surface sample
/// points. Samples farther than 2h from every IB point stay unassigned.
std::vector<SurfaceSample> extrapolate_to_surface(const InterpOperator& op, const Mesh& mesh,
                                                  const VecX& g, const VecX& U,
                                                  const std::vector<Vec3>& samples);

} // namespace ibflow
