#pragma once

#include "tala/common.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tala::krylov {

/// Stop when the residual drops below rel * |r0| or below abs, whichever happens first.
struct StoppingRule
{
    double relative      = 1e-8;
    double absolute      = 0.0;
    int    max_iterations = 1000;

    void validate() const;
};

struct SolveReport
{
    int                   iterations       = 0;
    bool                  converged        = false;
    double                initial_residual = 0.0;
    double                final_residual   = 0.0;
    std::vector< double > history;
};

class SolverFailure : public std::runtime_error
{
 public:
    explicit SolverFailure( const std::string& what )
    : std::runtime_error( what )
    {}
};

/// Called after each outer iteration with (iteration, residual norm).
using IterationCallback = std::function< void( int, double ) >;

/// Preconditioned CG with the flexible (Polak-Ribiere) beta; an optional projection keeps
/// residuals and search directions in a constrained subspace. precond may be empty.
SolveReport cg( const LinearOperator& op, const Vector& rhs, Vector& x, const LinearOperator& precond, const StoppingRule& stop,
                const Projection& projection = {} );

/// Right-preconditioned flexible GMRES with restarts.
SolveReport fgmres( const LinearOperator& op, const Vector& rhs, Vector& x, const LinearOperator& precond, const StoppingRule& stop,
                    int restart = 50, const Projection& projection = {}, const IterationCallback& callback = {} );

/// Largest eigenvalue of diag^{-1} op by power iteration from a seeded random start.
double estimate_spectral_bound( const LinearOperator& op, const Vector& diag, int iterations = 30, std::uint64_t seed = 42,
                                const Projection& projection = {} );

/// Jacobi-preconditioned Chebyshev iteration of fixed degree for diag^{-1} op.
class ChebyshevSmoother
{
 public:
    ChebyshevSmoother() = default;
    ChebyshevSmoother( LinearOperator op, Vector diag, int degree, Projection projection = {} );

    /// Power iteration; sets the interval to [lambda_hi / 10, lambda_hi] with lambda_hi = 1.1 * estimate.
    void estimate( int iterations = 30, std::uint64_t seed = 42 );
    void set_interval( double lo, double hi );

    bool   estimated() const { return hi_ > 0.0; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    int    degree() const { return degree_; }

    /// steps sweeps of the degree-k polynomial iteration on op x = b.
    void smooth( const Vector& b, Vector& x, int steps ) const;

 private:
    LinearOperator op_;
    Vector         inv_diag_;
    int            degree_ = 1;
    Projection     projection_;
    double         lo_ = 0.0;
    double         hi_ = 0.0;
};

struct MultigridLevel
{
    LinearOperator op;
    Vector         diagonal;
    Projection     projection;
    LinearOperator prolongate_from_coarser; // empty on the coarsest level
    LinearOperator restrict_to_coarser;
};

struct VCycleConfig
{
    int           smoothing_steps  = 3; // pre and post
    int           degree           = 2;
    StoppingRule  coarse           = { 1e-2, 0.0, 10000 };
    int           power_iterations = 30;
    std::uint64_t seed             = 42;
};

/// Geometric multigrid V-cycle; levels are ordered coarsest first.
class Multigrid
{
 public:
    Multigrid( std::vector< MultigridLevel > levels, VCycleConfig config );

    int num_levels() const { return static_cast< int >( levels_.size() ); }

    void vcycle( const Vector& b, Vector& x ) const;

    /// One V-cycle from a zero initial guess.
    LinearOperator preconditioner() const;

    const ChebyshevSmoother& smoother( int level ) const { return smoothers_[level]; }
    int                      coarse_iterations() const { return coarse_iterations_; }

 private:
    std::vector< MultigridLevel >    levels_;
    VCycleConfig                     config_;
    std::vector< ChebyshevSmoother > smoothers_;
    mutable int                      coarse_iterations_ = 0;

    void cycle( int level, const Vector& b, Vector& x ) const;
};

/// Diagonally preconditioned CG on the coarsest operator; throws SolverFailure on non-convergence.
SolveReport coarse_solve( const LinearOperator& op, const Vector& diag, const Vector& rhs, Vector& x, const StoppingRule& stop,
                          const Projection& projection = {} );

/// Jacobi preconditioner from a diagonal.
LinearOperator jacobi( const Vector& diag );

} // namespace tala::krylov
