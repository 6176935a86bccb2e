#include "tala/stokes/solver.hpp"

#include "tala/parallel.hpp"

#include <chrono>
#include <cmath>

namespace tala::stokes {

using fem::SpaceKind;

const char* to_string( UzawaKind kind )
{
    switch ( kind )
    {
    case UzawaKind::Inexact:
        return "inexact";
    case UzawaKind::AdjointInexact:
        return "adjoint";
    case UzawaKind::Symmetric:
        return "symmetric";
    }
    return "?";
}

const char* to_string( SchurKind kind )
{
    switch ( kind )
    {
    case SchurKind::Mass:
        return "mass";
    case SchurKind::WeightedBFBT:
        return "wbfbt";
    case SchurKind::VCycleBFBT:
        return "vcycle-bfbt";
    }
    return "?";
}

UzawaKind parse_uzawa( const std::string& s )
{
    for ( auto k : { UzawaKind::Inexact, UzawaKind::AdjointInexact, UzawaKind::Symmetric } )
        if ( s == to_string( k ) )
            return k;
    throw ContractViolation( "unknown Uzawa variant: " + s );
}

SchurKind parse_schur( const std::string& s )
{
    for ( auto k : { SchurKind::Mass, SchurKind::WeightedBFBT, SchurKind::VCycleBFBT } )
        if ( s == to_string( k ) )
            return k;
    throw ContractViolation( "unknown Schur approximation: " + s );
}

void SolverConfig::validate() const
{
    require( sigma > 0 && omega > 0, "relaxation parameters must be positive" );
    for ( double t : { tol_A, tol_VBFBT, tol_invMass, tol_wBFBT, tol_coarse, tol_up, tol_T, tol_VectorMass } )
        require( t > 0, "tolerances must be positive" );
    require( a_l > 0 && a_r > 0, "boundary layer scalings must be positive" );
    require( m_A >= 1 && deg_A >= 1 && m_V >= 1 && deg_V >= 1, "smoothing parameters must be positive" );
    require( max_outer >= 1 && restart >= 1 && max_inner >= 1, "iteration budgets must be positive" );
}

double variant_tol_A( UzawaKind kind )
{
    return kind == UzawaKind::Symmetric ? 1e-2 : 1e-4;
}

// ---------------------------------------------------------------------------------------------

void uzawa_step( UzawaKind kind, double sigma, double omega, const UzawaOperators& ops, const Vector& f, const Vector& g, Vector& u,
                 Vector& p )
{
    auto velocity = [&]() {
        Vector r = f;
        Vector t;
        if ( !( u.array() == 0.0 ).all() )
        {
            ops.A( u, t );
            r -= t;
        }
        if ( !( p.array() == 0.0 ).all() )
        {
            ops.BT( p, t );
            r -= t;
        }
        if ( ops.velocity_projection )
            ops.velocity_projection( r );
        Vector du;
        ops.A_inv( r, du );
        u += sigma * du;
        if ( ops.velocity_projection )
            ops.velocity_projection( u );
    };
    auto pressure = [&]() {
        Vector r = g;
        if ( !( u.array() == 0.0 ).all() )
        {
            Vector t;
            ops.divergence( u, t );
            r -= t;
        }
        if ( ops.pressure_projection )
            ops.pressure_projection( r );
        Vector dp;
        ops.S_inv( r, dp );
        p -= omega * dp;
        if ( ops.pressure_projection )
            ops.pressure_projection( p );
    };

    switch ( kind )
    {
    case UzawaKind::Inexact:
        velocity();
        pressure();
        break;
    case UzawaKind::AdjointInexact:
        pressure();
        velocity();
        break;
    case UzawaKind::Symmetric:
        velocity();
        pressure();
        velocity();
        break;
    }
}

// ---------------------------------------------------------------------------------------------

LinearOperator ABlockLevel::reduced() const
{
    auto A = op;
    auto P = projection;
    return [A, P]( const Vector& x, Vector& y ) {
        Vector xp = x;
        P->apply_velocity( xp );
        A->apply( xp, y );
        P->apply_velocity( y );
        const int n = static_cast< int >( x.size() ) / 2;
        for ( int i : P->surface_nodes() )
        {
            y[i]     = x[i];
            y[n + i] = x[n + i];
        }
    };
}

ViscosityProvider constant_viscosity( const fem::Discretization& d, double eta )
{
    return [&d, eta]( int level ) { return fem::constant_field( d, level, 6, eta ); };
}

ViscosityProvider viscosity_provider( std::shared_ptr< const fem::ViscosityField > field, bool use_surrogate )
{
    return [field, use_surrogate]( int level ) { return field->quadrature( level, 6, use_surrogate ); };
}

ABlockHierarchy::ABlockHierarchy( const fem::Discretization& d, int l_min, int l_max, const ViscosityProvider& eta )
: d_( &d )
, l_min_( l_min )
, l_max_( l_max )
{
    require( 0 <= l_min && l_min <= l_max && l_max <= d.max_level(), "invalid level range" );
    for ( int l = l_min; l <= l_max; ++l )
    {
        ABlockLevel L;
        L.op         = std::make_shared< fem::ViscousOperator >( d, l, eta( l ) );
        L.projection = std::make_shared< constraints::BoundaryProjection >( d, l );
        std::vector< int > rows;
        const int          n = d.num_nodes( SpaceKind::P2, l );
        for ( int i : L.projection->surface_nodes() )
        {
            rows.push_back( i );
            rows.push_back( n + i );
        }
        L.diagonal = constraints::dirichlet_masked_diagonal( L.op->diagonal(), rows );
        levels_.push_back( std::move( L ) );
        if ( l > l_min )
            transfers_.push_back( std::make_shared< fem::Transfer >( d, SpaceKind::P2Vector, l - 1 ) );
    }
}

std::unique_ptr< krylov::Multigrid > ABlockHierarchy::multigrid( const krylov::VCycleConfig& cfg ) const
{
    std::vector< krylov::MultigridLevel > mls;
    for ( std::size_t i = 0; i < levels_.size(); ++i )
    {
        krylov::MultigridLevel m;
        m.op         = levels_[i].reduced();
        m.diagonal   = levels_[i].diagonal;
        m.projection = levels_[i].projection->velocity_projection();
        if ( i > 0 )
        {
            auto t                    = transfers_[i - 1];
            m.prolongate_from_coarser = [t]( const Vector& c, Vector& f ) { t->prolongate( c, f ); };
            m.restrict_to_coarser     = [t]( const Vector& f, Vector& c ) { t->restrict_to_coarse( f, c ); };
        }
        mls.push_back( std::move( m ) );
    }
    return std::make_unique< krylov::Multigrid >( std::move( mls ), cfg );
}

// ---------------------------------------------------------------------------------------------

namespace {

/// P1 Neumann stiffness with a coefficient, on every level, with its V-cycle.
struct NeumannHierarchy
{
    std::vector< std::shared_ptr< fem::StiffnessOperator > > ops;
    std::vector< std::shared_ptr< fem::Transfer > >          transfers;
    std::unique_ptr< krylov::Multigrid >                     mg;

    NeumannHierarchy( const fem::Discretization& d, int l_min, int l_max, const ViscosityProvider& eta, double scale,
                      const krylov::VCycleConfig& cfg )
    {
        std::vector< krylov::MultigridLevel > mls;
        for ( int l = l_min; l <= l_max; ++l )
        {
            auto c = fem::scale_surface_elements( d, eta( l ), scale );
            c      = fem::transform( std::move( c ), []( double v ) { return 1.0 / std::sqrt( v ); } );
            ops.push_back( std::make_shared< fem::StiffnessOperator >( d, l, SpaceKind::P1, std::move( c ),
                                                                       fem::OperatorTag::StiffInvSqrtEta ) );
            krylov::MultigridLevel m;
            m.op         = ops.back()->linear_operator();
            m.diagonal   = ops.back()->diagonal();
            m.projection = []( Vector& x ) { constraints::zero_mean( x ); };
            if ( l > l_min )
            {
                auto t = std::make_shared< fem::Transfer >( d, SpaceKind::P1, l - 1 );
                transfers.push_back( t );
                m.prolongate_from_coarser = [t]( const Vector& c, Vector& f ) { t->prolongate( c, f ); };
                m.restrict_to_coarser     = [t]( const Vector& f, Vector& c ) { t->restrict_to_coarse( f, c ); };
            }
            mls.push_back( std::move( m ) );
        }
        mg = std::make_unique< krylov::Multigrid >( std::move( mls ), cfg );
    }
};

struct VectorMass
{
    std::unique_ptr< fem::MassOperator > op;
    Vector                               diag;
};

} // namespace

struct StokesSolver::WeightedParts
{
    std::unique_ptr< NeumannHierarchy > K_l;
    std::unique_ptr< NeumannHierarchy > K_r; // empty when a_l == a_r
    VectorMass                          M_l;
    VectorMass                          M_r;
    bool                                symmetric = true;
};

StokesSolver::StokesSolver( StokesSetup setup, SolverConfig cfg )
: setup_( std::move( setup ) )
, cfg_( cfg )
{
    cfg_.validate();
    require( setup_.discretization != nullptr, "Stokes setup needs a discretization" );
    require( static_cast< bool >( setup_.viscosity ), "Stokes setup needs a viscosity" );
    const auto& d = *setup_.discretization;
    const int   L = setup_.l_max;

    hierarchy_         = std::make_unique< ABlockHierarchy >( d, setup_.l_min, L, setup_.viscosity );
    finest_projection_ = hierarchy_->finest().projection;
    nu_                = 2 * d.num_nodes( SpaceKind::P2, L );
    np_                = d.num_nodes( SpaceKind::P1, L );

    B_  = std::make_unique< fem::DivergenceOperator >( d, L );
    BT_ = std::make_unique< fem::GradientOperator >( d, L );
    if ( setup_.grad_ln_rho )
        C_ = std::make_unique< fem::DensityGradientOperator >( d, L, setup_.grad_ln_rho );

    krylov::VCycleConfig vc;
    vc.smoothing_steps  = cfg_.m_A;
    vc.degree           = cfg_.deg_A;
    vc.coarse           = { cfg_.tol_coarse, 0.0, 100000 };
    vc.power_iterations = cfg_.power_iterations;
    mg_A_               = hierarchy_->multigrid( vc );

    eta_fine_ = hierarchy_->finest().op->viscosity();
    mass_inv_eta_ = std::make_unique< fem::MassOperator >( d, L, SpaceKind::P1,
                                                           fem::transform( eta_fine_, []( double v ) { return 1.0 / v; } ),
                                                           fem::OperatorTag::MassInvEta );
    mass_inv_eta_diag_ = mass_inv_eta_->diagonal();

    if ( cfg_.schur == SchurKind::VCycleBFBT )
    {
        krylov::VCycleConfig cheap = vc;
        cheap.smoothing_steps      = cfg_.m_V;
        cheap.degree               = cfg_.deg_V;
        mg_cheap_                  = hierarchy_->multigrid( cheap );
    }
    if ( cfg_.schur == SchurKind::WeightedBFBT )
    {
        weighted_            = std::make_unique< WeightedParts >();
        weighted_->symmetric = cfg_.a_l == cfg_.a_r;
        krylov::VCycleConfig kc;
        kc.coarse           = { cfg_.tol_coarse, 0.0, 100000 };
        kc.power_iterations = cfg_.power_iterations;
        weighted_->K_l = std::make_unique< NeumannHierarchy >( d, setup_.l_min, L, setup_.viscosity, cfg_.a_l * cfg_.a_l, kc );
        if ( !weighted_->symmetric )
            weighted_->K_r = std::make_unique< NeumannHierarchy >( d, setup_.l_min, L, setup_.viscosity, cfg_.a_r * cfg_.a_r, kc );
        auto make_mass = [&]( double a ) {
            VectorMass m;
            auto       c = fem::scale_surface_elements( d, eta_fine_, a * a );
            c            = fem::transform( std::move( c ), []( double v ) { return std::sqrt( v ); } );
            m.op   = std::make_unique< fem::MassOperator >( d, L, SpaceKind::P2Vector, std::move( c ), fem::OperatorTag::MassSqrtEta );
            m.diag = m.op->diagonal();
            return m;
        };
        weighted_->M_l = make_mass( cfg_.a_l );
        weighted_->M_r = make_mass( cfg_.a_r );
    }
}

StokesSolver::~StokesSolver() = default;

const fem::ViscousOperator& StokesSolver::A() const
{
    return *hierarchy_->finest().op;
}

void StokesSolver::apply_divergence( const Vector& u, Vector& q, bool with_C ) const
{
    B_->apply( u, q );
    if ( with_C && C_ )
    {
        Vector c;
        C_->apply( u, c );
        q += c;
    }
}

void StokesSolver::apply_A( const Vector& u, Vector& y ) const
{
    hierarchy_->finest().reduced()( u, y );
}

void StokesSolver::apply_BT( const Vector& p, Vector& y ) const
{
    Vector pp = p;
    constraints::zero_mean( pp );
    BT_->apply( pp, y );
    finest_projection_->apply_velocity( y );
}

void StokesSolver::apply_Bbar( const Vector& u, Vector& q, bool with_C ) const
{
    Vector up = u;
    finest_projection_->apply_velocity( up );
    apply_divergence( up, q, with_C );
    constraints::zero_mean( q );
}

void StokesSolver::apply_saddle( const Vector& x, Vector& y ) const
{
    require( x.size() == nu_ + np_, "saddle vector has the wrong size" );
    const Vector u = x.head( nu_ );
    const Vector p = x.tail( np_ );
    Vector       yu, t, yp;
    apply_A( u, yu );
    apply_BT( p, t );
    yu += t;
    apply_Bbar( u, yp, true );
    y.resize( nu_ + np_ );
    y.head( nu_ ) = yu;
    y.tail( np_ ) = yp;
}

void StokesSolver::note_inner( const krylov::SolveReport& rep, long& counter ) const
{
    counter += rep.iterations;
    if ( !rep.converged )
        ++counts_.degraded;
}

void StokesSolver::apply_A_inv( const Vector& r, Vector& z ) const
{
    z = Vector::Zero( r.size() );
    const auto rep = krylov::cg( hierarchy_->finest().reduced(), r, z, mg_A_->preconditioner(), { cfg_.tol_A, 0.0, cfg_.max_inner },
                                 finest_projection_->velocity_projection() );
    note_inner( rep, counts_.a_block );
}

void StokesSolver::apply_cheap_vcycle( const Vector& r, Vector& z ) const
{
    require( mg_cheap_ != nullptr, "cheap V-cycle only exists for the V-cycle BFBT approximation" );
    Vector rp = r;
    finest_projection_->apply_velocity( rp );
    z = Vector::Zero( r.size() );
    mg_cheap_->vcycle( rp, z );
    finest_projection_->apply_velocity( z );
}

void StokesSolver::apply_mass_inv_eta_inverse( const Vector& q, Vector& y, double tol ) const
{
    y              = Vector::Zero( q.size() );
    const auto rep = krylov::cg( mass_inv_eta_->linear_operator(), q, y, krylov::jacobi( mass_inv_eta_diag_ ), { tol, 0.0, cfg_.max_inner } );
    note_inner( rep, counts_.schur );
}

void StokesSolver::apply_vcycle_bfbt( const Vector& q, Vector& y ) const
{
    auto G = [this]( const Vector& x, Vector& out ) {
        Vector w, z;
        apply_BT( x, w );
        apply_cheap_vcycle( w, z );
        apply_Bbar( z, out, false );
    };
    auto precond = [this]( const Vector& r, Vector& z ) { apply_mass_inv_eta_inverse( r, z, cfg_.tol_invMass ); };
    const Projection pp = []( Vector& x ) { constraints::zero_mean( x ); };
    const krylov::StoppingRule stop{ cfg_.tol_VBFBT, 0.0, cfg_.max_inner };

    Vector y1 = Vector::Zero( q.size() );
    note_inner( krylov::cg( G, q, y1, precond, stop, pp ), counts_.schur );

    Vector w, z1, Az, z2, t;
    apply_BT( y1, w );
    apply_cheap_vcycle( w, z1 );
    apply_A( z1, Az );
    apply_cheap_vcycle( Az, z2 );
    apply_Bbar( z2, t, false );

    y = Vector::Zero( q.size() );
    note_inner( krylov::cg( G, t, y, precond, stop, pp ), counts_.schur );
    constraints::zero_mean( y );
}

void StokesSolver::apply_weighted_bfbt( const Vector& q, Vector& y ) const
{
    const auto& W  = *weighted_;
    const Projection pp = []( Vector& x ) { constraints::zero_mean( x ); };
    const krylov::StoppingRule ks{ cfg_.tol_wBFBT, cfg_.tol_wBFBT, cfg_.max_inner };
    const krylov::StoppingRule ms{ cfg_.tol_VectorMass, 0.0, cfg_.max_inner };
    const auto& Kr = W.symmetric ? *W.K_l : *W.K_r;

    Vector x1 = Vector::Zero( q.size() );
    note_inner( krylov::cg( Kr.ops.back()->linear_operator(), q, x1, Kr.mg->preconditioner(), ks, pp ), counts_.schur );

    auto mass_solve = [&]( const VectorMass& M, const Vector& r ) {
        Vector z   = Vector::Zero( r.size() );
        const auto rep = krylov::cg( M.op->linear_operator(), r, z, krylov::jacobi( M.diag ), ms, finest_projection_->velocity_projection() );
        note_inner( rep, counts_.schur );
        return z;
    };

    Vector w, Az, v;
    apply_BT( x1, w );
    const Vector z1 = mass_solve( W.M_r, w );
    apply_A( z1, Az );
    finest_projection_->mask_surface( Az );
    const Vector z2 = mass_solve( W.M_l, Az );
    apply_Bbar( z2, v, false );

    y = Vector::Zero( q.size() );
    note_inner( krylov::cg( W.K_l->ops.back()->linear_operator(), v, y, W.K_l->mg->preconditioner(), ks, pp ), counts_.schur );
    constraints::zero_mean( y );
}

void StokesSolver::apply_schur( const Vector& q, Vector& y ) const
{
    Vector qp = q;
    constraints::zero_mean( qp );
    switch ( cfg_.schur )
    {
    case SchurKind::Mass:
        apply_mass_inv_eta_inverse( qp, y, cfg_.tol_invMass );
        constraints::zero_mean( y );
        break;
    case SchurKind::WeightedBFBT:
        apply_weighted_bfbt( qp, y );
        break;
    case SchurKind::VCycleBFBT:
        apply_vcycle_bfbt( qp, y );
        break;
    }
}

UzawaOperators StokesSolver::uzawa_operators() const
{
    UzawaOperators ops;
    ops.A          = [this]( const Vector& x, Vector& y ) { apply_A( x, y ); };
    ops.BT         = [this]( const Vector& x, Vector& y ) { apply_BT( x, y ); };
    const bool wc  = cfg_.compressible_pressure_update;
    ops.divergence = [this, wc]( const Vector& x, Vector& y ) { apply_Bbar( x, y, wc ); };
    ops.A_inv      = [this]( const Vector& x, Vector& y ) { apply_A_inv( x, y ); };
    ops.S_inv      = [this]( const Vector& x, Vector& y ) { apply_schur( x, y ); };
    ops.velocity_projection = finest_projection_->velocity_projection();
    ops.pressure_projection = []( Vector& x ) { constraints::zero_mean( x ); };
    return ops;
}

void StokesSolver::apply_preconditioner( const Vector& r, Vector& z ) const
{
    const auto ops = uzawa_operators();
    Vector     u   = Vector::Zero( nu_ );
    Vector     p   = Vector::Zero( np_ );
    uzawa_step( cfg_.uzawa, cfg_.sigma, cfg_.omega, ops, r.head( nu_ ), r.tail( np_ ), u, p );
    z.resize( nu_ + np_ );
    z.head( nu_ ) = u;
    z.tail( np_ ) = p;
}

krylov::StoppingRule StokesSolver::default_stopping_rule() const
{
    return { 0.0, cfg_.tol_up, cfg_.max_outer };
}

StokesResult StokesSolver::solve( const Vector& f, const Vector& g, const Vector& u_int, const krylov::StoppingRule& stop,
                                  const IterationLog& log, const Vector* initial ) const
{
    require( f.size() == nu_ && u_int.size() == nu_ && g.size() == np_, "Stokes load vectors have the wrong size" );
    const auto t0 = std::chrono::steady_clock::now();
    reset_counts();

    auto div = [this]( const Vector& u, Vector& q ) { apply_divergence( u, q, true ); };
    const auto red = constraints::eliminate_dirichlet( *finest_projection_, A(), div, f, g, u_int );

    Vector b( nu_ + np_ );
    b.head( nu_ ) = red.f;
    b.tail( np_ ) = red.g;

    Vector x = Vector::Zero( nu_ + np_ );
    if ( initial != nullptr )
    {
        require( initial->size() == nu_ + np_, "initial guess has the wrong size" );
        x = *initial;
        x.head( nu_ ) -= u_int;
    }
    const auto proj = [this]( Vector& v ) {
        Vector u = v.head( nu_ );
        finest_projection_->apply_velocity( u );
        v.head( nu_ ) = u;
        Vector p      = v.tail( np_ );
        constraints::zero_mean( p );
        v.tail( np_ ) = p;
    };
    proj( x );

    const LinearOperator op = [this]( const Vector& in, Vector& out ) { apply_saddle( in, out ); };
    Vector               r0v;
    op( x, r0v );
    const double r0 = norm( b - r0v );

    krylov::IterationCallback cb;
    if ( log )
    {
        cb = [&]( int it, double res ) {
            IterationRecord rec;
            rec.iteration = it;
            rec.absolute  = res;
            rec.relative  = r0 > 0 ? res / r0 : 0.0;
            rec.seconds   = std::chrono::duration< double >( std::chrono::steady_clock::now() - t0 ).count();
            rec.a_block   = counts_.a_block;
            rec.schur     = counts_.schur;
            log( rec );
        };
    }

    StokesResult res;
    res.report = krylov::fgmres( op, b, x, [this]( const Vector& r, Vector& z ) { apply_preconditioner( r, z ); }, stop, cfg_.restart,
                                 proj, cb );
    res.inner   = counts_;
    res.seconds = std::chrono::duration< double >( std::chrono::steady_clock::now() - t0 ).count();
    if ( !res.report.converged )
    {
        throw krylov::SolverFailure( "Stokes solver did not converge within " + std::to_string( stop.max_iterations ) +
                                     " iterations (residual " + std::to_string( res.report.final_residual ) + ")" );
    }
    proj( x );
    res.u = x.head( nu_ ) + u_int;
    res.p = x.tail( np_ );
    const auto& d = *setup_.discretization;
    res.c_p       = constraints::pressure_shift_constant( fem::FieldFunction( d.space( SpaceKind::P1, setup_.l_max ), res.p ) );
    res.max_normal_velocity = finest_projection_->max_normal_velocity( res.u );
    res.mean_pressure       = sum( res.p ) / static_cast< double >( np_ );
    return res;
}

// ---------------------------------------------------------------------------------------------

Vector buoyancy_load( const fem::Discretization& d, int level, const Vector& T, const physics::PhysicalParams& phys )
{
    require( T.size() == d.num_nodes( SpaceKind::P2, level ), "temperature must be a P2 field on the Stokes level" );
    const auto Tq  = fem::field_from_nodal( d, level, 6, SpaceKind::P2, T );
    const auto& geo = d.geometry( level, 6 );
    fem::VectorQuadratureField load;
    load.level      = level;
    load.degree     = Tq.degree;
    load.num_points = Tq.num_points;
    load.values.resize( Tq.values.size() );
    for ( std::size_t i = 0; i < load.values.size(); ++i )
    {
        const Vec2&  x  = geo.x[i];
        const double Td = Tq.values[i] - phys.reference_temperature( x );
        load.values[i]  = -phys.buoyancy_factor( x ) * Td * phys.gravity( x );
    }
    return fem::vector_load( d, level, load );
}

StokesRhs build_stokes_rhs( const fem::Discretization& d, int level, const Vector& T, const physics::PhysicalParams& phys )
{
    return { buoyancy_load( d, level, T, phys ), Vector::Zero( d.num_nodes( SpaceKind::P1, level ) ) };
}

ConstraintCheck check_constraints( const StokesSolver& s, const StokesResult& r )
{
    ConstraintCheck c;
    const double    uinf = r.u.cwiseAbs().maxCoeff();
    const double    pinf = r.p.size() ? r.p.cwiseAbs().maxCoeff() : 0.0;
    c.normal_ratio       = uinf > 0 ? s.projection().max_normal_velocity( r.u ) / uinf : 0.0;
    c.mean_ratio         = pinf > 0 ? std::abs( sum( r.p ) / static_cast< double >( r.p.size() ) ) / pinf : 0.0;
    const auto& d        = s.discretization();
    Vector      shifted  = r.p.array() + r.c_p;
    c.shifted_integral   = std::abs( fem::integrate( fem::FieldFunction( d.space( SpaceKind::P1, s.level() ), shifted ) ) );
    return c;
}

} // namespace tala::stokes
