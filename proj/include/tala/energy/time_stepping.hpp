#pragma once

#include "tala/constraints/boundary.hpp"
#include "tala/fem/coefficients.hpp"
#include "tala/fem/operators.hpp"
#include "tala/krylov/solvers.hpp"
#include "tala/physics/model.hpp"
#include "tala/stokes/solver.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace tala::energy {

/// Variable-step BDF2 weights: D = s_new T^{n+1} - s_n T^n + s_nm1 T^{n-1}.
struct BDF2Coefficients
{
    double s_new = 1.0;
    double s_n   = 1.0;
    double s_nm1 = 0.0;
};

BDF2Coefficients bdf2_coefficients( double tau_new, double tau_old );
BDF2Coefficients implicit_euler_coefficients();

/// f^n + (f^n - f^{n-1}) tau_new / tau_old.
Vector extrapolate( const Vector& f_n, const Vector& f_nm1, double tau_new, double tau_old );

struct MMOCConfig
{
    double clamp_epsilon = 1e-12; // departure points are kept in [r_cmb + eps, r_surface - eps]
    int    max_substeps  = 10000;
};

/// Radial clamp into the shell.
Vec2 clamp_to_shell( const Vec2& x, double r_inner, double r_outer, double eps );

/// Velocity u(t^{n+1} - s) = u_new + (s / tau)(u_old - u_new) on one level.
struct VelocityInterval
{
    const Vector* u_new = nullptr;
    const Vector* u_old = nullptr;
    double        tau   = 0.0;
};

/// RK4 substeps so that every substep moves at most one minimal element diameter.
int mmoc_substeps( const fem::Discretization& d, int level, const VelocityInterval& v, const MMOCConfig& cfg = {} );

/// Departure point of the particle sitting at x at the end of the interval.
Vec2 trace_back( const fem::Discretization& d, int level, const Vec2& x, const VelocityInterval& v, int substeps,
                 const MMOCConfig& cfg = {} );

/// T evaluated at the departure points of all P2 nodes.
Vector mmoc_advect( const fem::Discretization& d, int level, const Vector& T, const VelocityInterval& v, const MMOCConfig& cfg = {} );

/// History value for the older level: trace through [t^n, t^{n+1}] with `first`, continue
/// through [t^{n-1}, t^n] with `second`, then evaluate T^{n-1} once.
Vector mmoc_history( const fem::Discretization& d, int level, const Vector& T, const VelocityInterval& first,
                     const VelocityInterval& second, const MMOCConfig& cfg = {} );

struct TimestepControl
{
    double C_CFL     = 1.0;
    double tau_max   = 1e-3;
    double ratio_min = 0.5;
    double ratio_max = 1.5;

    void validate() const;
};

/// C_CFL / max_K (max nodal speed on K / h_K); tau_max when u vanishes.
double cfl_timestep( const fem::Discretization& d, int level, const Vector& u, double C_CFL, double tau_max );

/// CFL step clipped to tau_max and to the ratio window around tau_prev (ignored when tau_prev <= 0).
double select_timestep( const TimestepControl& c, const fem::Discretization& d, int level, const Vector& u, double tau_prev );

/// Coefficients of the temperature problem after division by rho C^p.
struct EnergyParams
{
    double Pe    = 1.0;
    double Ra    = 1.0;
    double Di    = 0.0;
    double cp    = 1.0;
    double k     = 1.0;
    double alpha = 1.0;
    double H     = 0.0;

    std::function< double( const Vec2& ) >         density;
    std::function< Vec2( const Vec2& ) >           grad_ln_rho; // empty: constant density
    std::function< Vec2( const Vec2& ) >           gravity;
    std::function< double( const Vec2&, double ) > viscosity;   // empty: no shear heating

    bool include_lhs_advection = true;
    bool shear_cutoff          = true; // no shear heating on elements touching the surface
    bool linearized_shear      = true; // decaying part of d(shear)/dT taken implicitly around T*
};

EnergyParams energy_params( const physics::PhysicalParams& p );

struct DiffusionInputs
{
    BDF2Coefficients s;
    double           tau = 0.0;
    Vector           u_star;
    Vector           T_star;
    Vector           T_hat_n;
    Vector           T_hat_nm1;
    Vector           T_boundary; // used at surface and CMB nodes only
    std::function< double( const Vec2& ) > extra_source; // optional additional right-hand side
};

struct DiffusionResult
{
    Vector              T;
    krylov::SolveReport report;
    long                inner = 0;
};

/// Shear heating (Pe Di / Ra) 2 eta(x, T*) eps(u*):eps(u*) / (rho C^p) at degree-6 quadrature.
fem::QuadratureField shear_heating( const fem::Discretization& d, int level, const EnergyParams& e, const Vector& u_star,
                                    const Vector& T_star );

/// Shear heating S(T*) and the rate max(0, -dS/dT (T*)), both at degree-6 quadrature.
struct ShearLinearization
{
    fem::QuadratureField source;
    fem::QuadratureField rate;
};

ShearLinearization linearized_shear_heating( const fem::Discretization& d, int level, const EnergyParams& e, const Vector& u_star,
                                             const Vector& T_star );

/// One temperature solve: FGMRES to absolute tol_T, preconditioned by CG on the mass + diffusion part.
DiffusionResult solve_diffusion_step( const fem::Discretization& d, int level, const EnergyParams& e, const DiffusionInputs& in,
                                      double tol_T, int max_iterations = 500, double relative = 0.0 );

/// P2 indices of all surface and CMB nodes.
std::vector< int > temperature_boundary_nodes( const fem::Discretization& d, int level );

/// Adiabatic profile plus relative uniform noise on interior nodes; boundary data at the shell.
Vector initial_temperature( const fem::Discretization& d, int level, const physics::PhysicalParams& p, std::uint64_t seed,
                            double relative_noise = 0.03 );

struct TimeState
{
    long   step = 0;
    double t    = 0.0;
    double tau  = 0.0; // last step size (0 before the first step)
    Vector T;
    Vector T_prev;
    Vector u;
    Vector u_prev;
    Vector p;
};

struct SimulationContext
{
    std::shared_ptr< const fem::Discretization > discretization;
    int                                          level = 0;
    int                                          l_min = 0;
    int                                          l_eta = 0;
    physics::PhysicalParams                      physics;
    EnergyParams                                 energy;
    stokes::SolverConfig                         solver;
    TimestepControl                              control;
    MMOCConfig                                   mmoc;
    constraints::BoundaryConditionSet            boundary;
    bool                                         use_surrogate = false;
    bool                                         buoyancy      = true;
};

SimulationContext make_context( std::shared_ptr< const fem::Discretization > d, int level, int l_min, int l_eta,
                                const physics::PhysicalParams& p, const stokes::SolverConfig& solver,
                                const TimestepControl& control );

TimeState initial_state( const SimulationContext& ctx, const Vector& T0 );

struct StepReport
{
    double tau               = 0.0;
    int    energy_iterations = 0;
    int    stokes_iterations = 0;
    long   a_block           = 0;
    long   schur             = 0;
    double energy_seconds    = 0.0;
    double stokes_seconds    = 0.0;
    double mmoc_seconds      = 0.0;
};

/// One step of the alternating scheme; the state is left untouched when a sub-solve fails.
StepReport advance_step( const SimulationContext& ctx, TimeState& state );

class CheckpointError : public std::runtime_error
{
 public:
    explicit CheckpointError( const std::string& what )
    : std::runtime_error( what )
    {}
};

constexpr std::uint32_t checkpoint_version = 1;

void      write_checkpoint( const std::string& path, const TimeState& s, std::uint64_t mesh_hash );
TimeState read_checkpoint( const std::string& path, std::uint64_t mesh_hash );

} // namespace tala::energy
