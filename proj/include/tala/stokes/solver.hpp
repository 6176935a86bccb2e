#pragma once

#include "tala/constraints/boundary.hpp"
#include "tala/fem/coefficients.hpp"
#include "tala/fem/operators.hpp"
#include "tala/fem/transfer.hpp"
#include "tala/krylov/solvers.hpp"
#include "tala/physics/model.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tala::stokes {

enum class UzawaKind
{
    Inexact,
    AdjointInexact,
    Symmetric
};

enum class SchurKind
{
    Mass,
    WeightedBFBT,
    VCycleBFBT
};

const char* to_string( UzawaKind kind );
const char* to_string( SchurKind kind );
UzawaKind   parse_uzawa( const std::string& s );
SchurKind   parse_schur( const std::string& s );

/// Solver parameters; defaults are the production set.
struct SolverConfig
{
    UzawaKind uzawa = UzawaKind::Symmetric;
    SchurKind schur = SchurKind::VCycleBFBT;

    double sigma = 1.0;
    double omega = 0.3;

    double tol_A  = 1e-2;
    int    m_A    = 3;
    int    deg_A  = 2;

    double tol_VBFBT      = 1e-1;
    double tol_invMass    = 1e-10;
    double tol_wBFBT      = 1e-10;
    int    m_V            = 1;
    int    deg_V          = 1;
    double tol_coarse     = 1e-2;
    double tol_up         = 1e-5;
    double tol_T          = 1e-10;
    double tol_VectorMass = 1e-4;
    double a_r            = 1.0;
    double a_l            = 1.0;

    /// Use B + C instead of B in the pressure update.
    bool compressible_pressure_update = true;

    int max_outer      = 500;
    int restart        = 100;
    int max_inner      = 2000;
    int power_iterations = 30;

    void validate() const;
};

/// tol_A used for a variant in comparisons: 1e-2 for Symmetric, 1e-4 otherwise.
double variant_tol_A( UzawaKind kind );

/// Operators of one Uzawa step on the reduced system.
struct UzawaOperators
{
    LinearOperator A;
    LinearOperator BT;
    LinearOperator divergence; // B or B + C
    LinearOperator A_inv;
    LinearOperator S_inv;
    Projection     velocity_projection;
    Projection     pressure_projection;
};

/// One update of the chosen variant starting from (u, p); updated in place.
void uzawa_step( UzawaKind kind, double sigma, double omega, const UzawaOperators& ops, const Vector& f, const Vector& g, Vector& u,
                 Vector& p );

/// Velocity A-block on one level, with the projection of the reduced space
/// (free-slip at the CMB, surface rows pinned).
struct ABlockLevel
{
    std::shared_ptr< fem::ViscousOperator >            op;
    std::shared_ptr< constraints::BoundaryProjection > projection;
    Vector                                             diagonal;

    LinearOperator reduced() const;
};

/// Viscosity coefficient at degree-6 quadrature on a level.
using ViscosityProvider = std::function< fem::QuadratureField( int level ) >;

ViscosityProvider constant_viscosity( const fem::Discretization& d, double eta );
ViscosityProvider viscosity_provider( std::shared_ptr< const fem::ViscosityField > field, bool use_surrogate );

/// A-block operators for levels l_min..l_max and multigrid V-cycles on them.
class ABlockHierarchy
{
 public:
    ABlockHierarchy( const fem::Discretization& d, int l_min, int l_max, const ViscosityProvider& eta );

    int                l_min() const { return l_min_; }
    int                l_max() const { return l_max_; }
    const ABlockLevel& level( int l ) const { return levels_[static_cast< std::size_t >( l - l_min_ )]; }
    const ABlockLevel& finest() const { return levels_.back(); }

    std::unique_ptr< krylov::Multigrid > multigrid( const krylov::VCycleConfig& cfg ) const;

 private:
    const fem::Discretization*            d_;
    int                                   l_min_;
    int                                   l_max_;
    std::vector< ABlockLevel >            levels_;
    std::vector< std::shared_ptr< fem::Transfer > > transfers_;
};

/// Inner iteration counters accumulated across preconditioner applications.
struct InnerCounts
{
    long a_block   = 0;
    long schur     = 0;
    long degraded  = 0;
};

struct IterationRecord
{
    int    iteration = 0;
    double absolute  = 0;
    double relative  = 0;
    double seconds   = 0;
    long   a_block   = 0;
    long   schur     = 0;
};

using IterationLog = std::function< void( const IterationRecord& ) >;

struct StokesSetup
{
    std::shared_ptr< const fem::Discretization > discretization;
    int                                          l_min = 0;
    int                                          l_max = 0;
    ViscosityProvider                            viscosity;
    std::function< Vec2( const Vec2& ) >         grad_ln_rho; // empty: incompressible
};

struct StokesResult
{
    Vector              u;
    Vector              p;
    double              c_p = 0.0;
    krylov::SolveReport report;
    InnerCounts         inner;
    double              seconds = 0.0;

    double max_normal_velocity = 0.0;
    double mean_pressure       = 0.0;
};

/// Reduced saddle point system on level l_max and its block preconditioners.
class StokesSolver
{
 public:
    StokesSolver( StokesSetup setup, SolverConfig cfg );
    ~StokesSolver();

    const SolverConfig&                    config() const { return cfg_; }
    const constraints::BoundaryProjection& projection() const { return *finest_projection_; }
    const ABlockHierarchy&                 hierarchy() const { return *hierarchy_; }
    const fem::Discretization&             discretization() const { return *setup_.discretization; }
    int                                    level() const { return setup_.l_max; }
    int                                    velocity_size() const { return nu_; }
    int                                    pressure_size() const { return np_; }

    /// Full operators on l_max (no projections).
    const fem::ViscousOperator&   A() const;
    const fem::DivergenceOperator& B() const { return *B_; }
    const fem::GradientOperator&  BT() const { return *BT_; }
    bool                          compressible() const { return static_cast< bool >( C_ ); }
    void                          apply_divergence( const Vector& u, Vector& q, bool with_C ) const;

    /// Reduced blocks: P A P + I_surface, P B^T P_p, P_p (B [+ C]) P.
    void apply_A( const Vector& u, Vector& y ) const;
    void apply_BT( const Vector& p, Vector& y ) const;
    void apply_Bbar( const Vector& u, Vector& q, bool with_C ) const;
    void apply_saddle( const Vector& x, Vector& y ) const;

    void apply_A_inv( const Vector& r, Vector& z ) const;
    void apply_schur( const Vector& q, Vector& y ) const;
    UzawaOperators uzawa_operators() const;
    void           apply_preconditioner( const Vector& r, Vector& z ) const;

    /// Cheap V-cycle used by the V-cycle BFBT approximation (as a linear operator).
    void apply_cheap_vcycle( const Vector& r, Vector& z ) const;

    const InnerCounts& counts() const { return counts_; }
    void               reset_counts() const { counts_ = {}; }

    /// Solve with a full momentum load f (unreduced), continuity load g and surface interpolant u_int.
    StokesResult solve( const Vector& f, const Vector& g, const Vector& u_int, const krylov::StoppingRule& stop,
                        const IterationLog& log = {}, const Vector* initial = nullptr ) const;

    /// Default outer rule: absolute tolerance tol_up.
    krylov::StoppingRule default_stopping_rule() const;

 private:
    StokesSetup  setup_;
    SolverConfig cfg_;
    int          nu_ = 0;
    int          np_ = 0;

    std::unique_ptr< ABlockHierarchy >                 hierarchy_;
    std::shared_ptr< constraints::BoundaryProjection > finest_projection_;
    std::unique_ptr< fem::DivergenceOperator >         B_;
    std::unique_ptr< fem::GradientOperator >           BT_;
    std::unique_ptr< fem::DensityGradientOperator >    C_;
    std::unique_ptr< krylov::Multigrid >               mg_A_;
    std::unique_ptr< krylov::Multigrid >               mg_cheap_;

    fem::QuadratureField                    eta_fine_;
    std::unique_ptr< fem::MassOperator >    mass_inv_eta_;
    Vector                                  mass_inv_eta_diag_;

    struct WeightedParts;
    std::unique_ptr< WeightedParts > weighted_;

    mutable InnerCounts counts_;

    void apply_mass_inv_eta_inverse( const Vector& q, Vector& y, double tol ) const;
    void apply_weighted_bfbt( const Vector& q, Vector& y ) const;
    void apply_vcycle_bfbt( const Vector& q, Vector& y ) const;
    void note_inner( const krylov::SolveReport& rep, long& counter ) const;
};

/// Momentum load -(Ra/Pe) rho alpha T_d g on the P2 vector space, T a P2 field on the level.
Vector buoyancy_load( const fem::Discretization& d, int level, const Vector& T, const physics::PhysicalParams& phys );

struct StokesRhs
{
    Vector f;
    Vector g;
};

StokesRhs build_stokes_rhs( const fem::Discretization& d, int level, const Vector& T, const physics::PhysicalParams& phys );

/// Check of the constraint invariants on a solution.
struct ConstraintCheck
{
    double normal_ratio    = 0.0; // max |u.n| / |u|_inf
    double mean_ratio      = 0.0; // |mean p| / |p|_inf
    double shifted_integral = 0.0; // |int (p + c_p)|
    bool   ok( double normal_tol = 1e-10, double mean_tol = 1e-12, double integral_tol = 1e-10 ) const
    {
        return normal_ratio <= normal_tol && mean_ratio <= mean_tol && shifted_integral <= integral_tol;
    }
};

ConstraintCheck check_constraints( const StokesSolver& s, const StokesResult& r );

} // namespace tala::stokes
