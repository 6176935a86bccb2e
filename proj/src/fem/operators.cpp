#include "tala/fem/operators.hpp"

#include "tala/fem/quadrature.hpp"

#include <vector>

namespace tala::fem {

namespace {

int local_size( SpaceKind kind )
{
    return kind == SpaceKind::P1 ? 3 : 6;
}

int components( SpaceKind kind )
{
    return kind == SpaceKind::P2Vector ? 2 : 1;
}

/// Runs kernel(e, out) over all elements into a private per-element buffer and sums the
/// contributions node by node in element order.
template < typename Kernel >
void element_apply( const Discretization& d, int level, SpaceKind out_kind, Kernel&& kernel, Vector& y )
{
    const int ne    = d.mesh().level( level ).num_elements();
    const int nloc  = local_size( out_kind );
    const int ncomp = components( out_kind );
    const int block = nloc * ncomp;

    std::vector< double > buffer( static_cast< std::size_t >( ne ) * block );
#pragma omp parallel for schedule( static )
    for ( int e = 0; e < ne; ++e )
    {
        kernel( e, buffer.data() + static_cast< std::size_t >( e ) * block );
    }

    const auto& inc = d.incidence( out_kind, level );
    const int   n   = static_cast< int >( inc.offsets.size() ) - 1;
    y.resize( static_cast< Eigen::Index >( n ) * ncomp );
#pragma omp parallel for schedule( static )
    for ( int i = 0; i < n; ++i )
    {
        for ( int c = 0; c < ncomp; ++c )
        {
            double s = 0.0;
            for ( int p = inc.offsets[i]; p < inc.offsets[i + 1]; ++p )
            {
                s += buffer[static_cast< std::size_t >( inc.element[p] ) * block + c * nloc + inc.local[p]];
            }
            y[static_cast< Eigen::Index >( c ) * n + i] = s;
        }
    }
}

void check_field( const QuadratureField& f, int level, int degree, const char* what )
{
    require( f.level == level && f.degree == degree, what );
}

} // namespace

const char* to_string( OperatorTag tag )
{
    switch ( tag )
    {
    case OperatorTag::ViscousBlock:
        return "A";
    case OperatorTag::Divergence:
        return "B";
    case OperatorTag::DensityGradient:
        return "C";
    case OperatorTag::Gradient:
        return "BT";
    case OperatorTag::MassInvEta:
        return "M_inv_eta";
    case OperatorTag::MassSqrtEta:
        return "M_sqrt_eta";
    case OperatorTag::StiffInvSqrtEta:
        return "K_inv_sqrt_eta";
    case OperatorTag::EnergyLHS:
        return "energy";
    case OperatorTag::PlainMass:
        return "mass";
    case OperatorTag::PlainStiffness:
        return "stiffness";
    }
    return "?";
}

FormOperator::FormOperator( const Discretization& d, int level, OperatorTag tag, SpaceKind domain, SpaceKind range )
: d_( &d )
, level_( level )
, tag_( tag )
, domain_( domain )
, range_( range )
{
    require( level >= 0 && level <= d.max_level(), "operator level outside the refinement hierarchy" );
}

void FormOperator::check_input( const Vector& x ) const
{
    require( x.size() == domain().dim(), "operator input does not match its domain space" );
}

Vector FormOperator::diagonal() const
{
    throw ContractViolation( "diagonal requested for a non-square operator" );
}

Vector FormOperator::operator()( const Vector& x ) const
{
    Vector y;
    apply( x, y );
    return y;
}

FieldFunction FormOperator::apply( const FieldFunction& x ) const
{
    require( x.space == domain(), "field does not live on the operator's domain space and level" );
    FieldFunction y( range() );
    apply( x.coefficients, y.coefficients );
    return y;
}

LinearOperator FormOperator::linear_operator() const
{
    return [this]( const Vector& x, Vector& y ) { apply( x, y ); };
}

// ---------------------------------------------------------------------------------------------

ViscousOperator::ViscousOperator( const Discretization& d, int level, QuadratureField eta )
: FormOperator( d, level, OperatorTag::ViscousBlock, SpaceKind::P2Vector, SpaceKind::P2Vector )
, eta_( std::move( eta ) )
{
    check_field( eta_, level, 6, "viscosity must be given at degree-6 points of the operator level" );
}

void ViscousOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   n     = d_->num_nodes( SpaceKind::P2Vector, level_ );
    const int   nq    = geo.num_points;

    element_apply(
        *d_, level_, SpaceKind::P2Vector,
        [&]( int e, double* out ) {
            double ux[6], uy[6];
            for ( int k = 0; k < 6; ++k )
            {
                ux[k]       = x[lm.p2_nodes[e][k]];
                uy[k]       = x[n + lm.p2_nodes[e][k]];
                out[k]      = 0.0;
                out[6 + k]  = 0.0;
            }
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const Mat2&       G   = geo.inv_jacobian_t[idx];
                Vec2              g[6];
                double            h00 = 0.0, h01 = 0.0, h10 = 0.0, h11 = 0.0;
                for ( int k = 0; k < 6; ++k )
                {
                    g[k] = G * basis.p2_grad[q][k];
                    h00 += ux[k] * g[k].x();
                    h01 += ux[k] * g[k].y();
                    h10 += uy[k] * g[k].x();
                    h11 += uy[k] * g[k].y();
                }
                const double half_div = 0.5 * ( h00 + h11 );
                const double w        = 2.0 * geo.weight[idx] * eta_.values[idx];
                const double s00      = w * ( h00 - half_div );
                const double s11      = w * ( h11 - half_div );
                const double s01      = w * 0.5 * ( h01 + h10 );
                for ( int k = 0; k < 6; ++k )
                {
                    out[k] += s00 * g[k].x() + s01 * g[k].y();
                    out[6 + k] += s01 * g[k].x() + s11 * g[k].y();
                }
            }
        },
        y );
}

Vector ViscousOperator::diagonal() const
{
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const int   nq    = geo.num_points;
    Vector      y;
    element_apply(
        *d_, level_, SpaceKind::P2Vector,
        [&]( int e, double* out ) {
            for ( int k = 0; k < 12; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const double      w   = geo.weight[idx] * eta_.values[idx];
                for ( int k = 0; k < 6; ++k )
                {
                    const double v = w * ( geo.inv_jacobian_t[idx] * basis.p2_grad[q][k] ).squaredNorm();
                    out[k] += v;
                    out[6 + k] += v;
                }
            }
        },
        y );
    return y;
}

// ---------------------------------------------------------------------------------------------

DivergenceOperator::DivergenceOperator( const Discretization& d, int level )
: FormOperator( d, level, OperatorTag::Divergence, SpaceKind::P2Vector, SpaceKind::P1 )
{}

void DivergenceOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 4 );
    const auto& basis = basis_table( 4 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   n     = d_->num_nodes( SpaceKind::P2Vector, level_ );
    const int   nq    = geo.num_points;
    element_apply(
        *d_, level_, SpaceKind::P1,
        [&]( int e, double* out ) {
            out[0] = out[1] = out[2] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const Mat2&       G   = geo.inv_jacobian_t[idx];
                double            div = 0.0;
                for ( int k = 0; k < 6; ++k )
                {
                    const Vec2 g = G * basis.p2_grad[q][k];
                    div += x[lm.p2_nodes[e][k]] * g.x() + x[n + lm.p2_nodes[e][k]] * g.y();
                }
                const double w = -geo.weight[idx] * div;
                for ( int i = 0; i < 3; ++i )
                    out[i] += w * basis.p1[q][i];
            }
        },
        y );
}

GradientOperator::GradientOperator( const Discretization& d, int level )
: FormOperator( d, level, OperatorTag::Gradient, SpaceKind::P1, SpaceKind::P2Vector )
{}

void GradientOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 4 );
    const auto& basis = basis_table( 4 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   nq    = geo.num_points;
    element_apply(
        *d_, level_, SpaceKind::P2Vector,
        [&]( int e, double* out ) {
            for ( int k = 0; k < 12; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const Mat2&       G   = geo.inv_jacobian_t[idx];
                double            p   = 0.0;
                for ( int i = 0; i < 3; ++i )
                    p += basis.p1[q][i] * x[lm.p1_nodes[e][i]];
                const double w = -geo.weight[idx] * p;
                for ( int k = 0; k < 6; ++k )
                {
                    const Vec2 g = G * basis.p2_grad[q][k];
                    out[k] += w * g.x();
                    out[6 + k] += w * g.y();
                }
            }
        },
        y );
}

DensityGradientOperator::DensityGradientOperator( const Discretization& d, int level,
                                                  const std::function< Vec2( const Vec2& ) >& grad_ln_rho )
: FormOperator( d, level, OperatorTag::DensityGradient, SpaceKind::P2Vector, SpaceKind::P1 )
, grad_( vector_field_from_function( d, level, 4, grad_ln_rho ) )
{}

void DensityGradientOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 4 );
    const auto& basis = basis_table( 4 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   n     = d_->num_nodes( SpaceKind::P2Vector, level_ );
    const int   nq    = geo.num_points;
    element_apply(
        *d_, level_, SpaceKind::P1,
        [&]( int e, double* out ) {
            out[0] = out[1] = out[2] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                Vec2              u   = Vec2::Zero();
                for ( int k = 0; k < 6; ++k )
                {
                    u.x() += basis.p2[q][k] * x[lm.p2_nodes[e][k]];
                    u.y() += basis.p2[q][k] * x[n + lm.p2_nodes[e][k]];
                }
                const double w = -geo.weight[idx] * grad_.values[idx].dot( u );
                for ( int i = 0; i < 3; ++i )
                    out[i] += w * basis.p1[q][i];
            }
        },
        y );
}

// ---------------------------------------------------------------------------------------------

MassOperator::MassOperator( const Discretization& d, int level, SpaceKind kind, QuadratureField coefficient, OperatorTag tag )
: FormOperator( d, level, tag, kind, kind )
, c_( std::move( coefficient ) )
{
    check_field( c_, level, 6, "mass coefficient must be given at degree-6 points of the operator level" );
}

void MassOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   nq    = geo.num_points;
    const int   ncomp = components( domain_ );
    const int   nloc  = local_size( domain_ );
    const int   n     = d_->num_nodes( domain_, level_ );
    const bool  p1    = domain_ == SpaceKind::P1;

    element_apply(
        *d_, level_, domain_,
        [&]( int e, double* out ) {
            for ( int k = 0; k < ncomp * nloc; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const double      w   = geo.weight[idx] * c_.values[idx];
                const double*     phi = p1 ? basis.p1[q].data() : basis.p2[q].data();
                for ( int c = 0; c < ncomp; ++c )
                {
                    double v = 0.0;
                    for ( int k = 0; k < nloc; ++k )
                    {
                        const int node = p1 ? lm.p1_nodes[e][k] : lm.p2_nodes[e][k];
                        v += phi[k] * x[c * n + node];
                    }
                    for ( int k = 0; k < nloc; ++k )
                        out[c * nloc + k] += w * v * phi[k];
                }
            }
        },
        y );
}

Vector MassOperator::diagonal() const
{
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const int   nq    = geo.num_points;
    const int   ncomp = components( domain_ );
    const int   nloc  = local_size( domain_ );
    const bool  p1    = domain_ == SpaceKind::P1;
    Vector      y;
    element_apply(
        *d_, level_, domain_,
        [&]( int e, double* out ) {
            for ( int k = 0; k < ncomp * nloc; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const double      w   = geo.weight[idx] * c_.values[idx];
                const double*     phi = p1 ? basis.p1[q].data() : basis.p2[q].data();
                for ( int c = 0; c < ncomp; ++c )
                    for ( int k = 0; k < nloc; ++k )
                        out[c * nloc + k] += w * phi[k] * phi[k];
            }
        },
        y );
    return y;
}

// ---------------------------------------------------------------------------------------------

StiffnessOperator::StiffnessOperator( const Discretization& d, int level, SpaceKind kind, QuadratureField coefficient,
                                      OperatorTag tag )
: FormOperator( d, level, tag, kind, kind )
, c_( std::move( coefficient ) )
{
    require( kind != SpaceKind::P2Vector, "stiffness operator is scalar" );
    check_field( c_, level, 6, "stiffness coefficient must be given at degree-6 points of the operator level" );
}

void StiffnessOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   nq    = geo.num_points;
    const int   nloc  = local_size( domain_ );
    const bool  p1    = domain_ == SpaceKind::P1;

    element_apply(
        *d_, level_, domain_,
        [&]( int e, double* out ) {
            double xl[6];
            for ( int k = 0; k < nloc; ++k )
            {
                xl[k]  = x[p1 ? lm.p1_nodes[e][k] : lm.p2_nodes[e][k]];
                out[k] = 0.0;
            }
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const Mat2&       G   = geo.inv_jacobian_t[idx];
                Vec2              g[6];
                Vec2              grad = Vec2::Zero();
                for ( int k = 0; k < nloc; ++k )
                {
                    g[k] = G * ( p1 ? basis.p1_grad[k] : basis.p2_grad[q][k] );
                    grad += xl[k] * g[k];
                }
                grad *= geo.weight[idx] * c_.values[idx];
                for ( int k = 0; k < nloc; ++k )
                    out[k] += grad.dot( g[k] );
            }
        },
        y );
}

Vector StiffnessOperator::diagonal() const
{
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const int   nq    = geo.num_points;
    const int   nloc  = local_size( domain_ );
    const bool  p1    = domain_ == SpaceKind::P1;
    Vector      y;
    element_apply(
        *d_, level_, domain_,
        [&]( int e, double* out ) {
            for ( int k = 0; k < nloc; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const double      w   = geo.weight[idx] * c_.values[idx];
                for ( int k = 0; k < nloc; ++k )
                    out[k] += w * ( geo.inv_jacobian_t[idx] * ( p1 ? basis.p1_grad[k] : basis.p2_grad[q][k] ) ).squaredNorm();
            }
        },
        y );
    return y;
}

// ---------------------------------------------------------------------------------------------

TransportOperator::TransportOperator( const Discretization& d, int level, QuadratureField mass, QuadratureField diffusion,
                                      VectorQuadratureField advection, OperatorTag tag )
: FormOperator( d, level, tag, SpaceKind::P2, SpaceKind::P2 )
, m_( std::move( mass ) )
, k_( std::move( diffusion ) )
, b_( std::move( advection ) )
{
    check_field( m_, level, 6, "mass coefficient must be given at degree-6 points of the operator level" );
    check_field( k_, level, 6, "diffusion coefficient must be given at degree-6 points of the operator level" );
    require( b_.level == level && b_.degree == 6, "advection field must be given at degree-6 points of the operator level" );
}

void TransportOperator::apply( const Vector& x, Vector& y ) const
{
    check_input( x );
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const auto& lm    = d_->mesh().level( level_ );
    const int   nq    = geo.num_points;

    element_apply(
        *d_, level_, SpaceKind::P2,
        [&]( int e, double* out ) {
            double xl[6];
            for ( int k = 0; k < 6; ++k )
            {
                xl[k]  = x[lm.p2_nodes[e][k]];
                out[k] = 0.0;
            }
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const Mat2&       G   = geo.inv_jacobian_t[idx];
                const auto&       phi = basis.p2[q];
                Vec2              g[6];
                Vec2              grad = Vec2::Zero();
                double            v    = 0.0;
                for ( int k = 0; k < 6; ++k )
                {
                    g[k] = G * basis.p2_grad[q][k];
                    grad += xl[k] * g[k];
                    v += xl[k] * phi[k];
                }
                const double w      = geo.weight[idx];
                const double scalar = w * ( m_.values[idx] * v + b_.values[idx].dot( grad ) );
                const Vec2   flux   = ( w * k_.values[idx] ) * grad;
                for ( int k = 0; k < 6; ++k )
                    out[k] += scalar * phi[k] + flux.dot( g[k] );
            }
        },
        y );
}

Vector TransportOperator::diagonal() const
{
    const auto& geo   = d_->geometry( level_, 6 );
    const auto& basis = basis_table( 6 );
    const int   nq    = geo.num_points;
    Vector      y;
    element_apply(
        *d_, level_, SpaceKind::P2,
        [&]( int e, double* out ) {
            for ( int k = 0; k < 6; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const double      w   = geo.weight[idx];
                for ( int k = 0; k < 6; ++k )
                {
                    const Vec2   g   = geo.inv_jacobian_t[idx] * basis.p2_grad[q][k];
                    const double phi = basis.p2[q][k];
                    out[k] += w * ( m_.values[idx] * phi * phi + k_.values[idx] * g.squaredNorm() + b_.values[idx].dot( g ) * phi );
                }
            }
        },
        y );
    return y;
}

// ---------------------------------------------------------------------------------------------

Vector load_vector( const Discretization& d, int level, SpaceKind kind, const QuadratureField& f )
{
    require( kind != SpaceKind::P2Vector, "use vector_load for vector spaces" );
    require( f.level == level, "load data lives on another level" );
    const auto& geo   = d.geometry( level, f.degree );
    const auto& basis = basis_table( f.degree );
    const int   nq    = geo.num_points;
    const int   nloc  = local_size( kind );
    Vector      y;
    element_apply(
        d, level, kind,
        [&]( int e, double* out ) {
            for ( int k = 0; k < nloc; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const double      w   = geo.weight[idx] * f.values[idx];
                for ( int k = 0; k < nloc; ++k )
                    out[k] += w * ( kind == SpaceKind::P1 ? basis.p1[q][k] : basis.p2[q][k] );
            }
        },
        y );
    return y;
}

Vector vector_load( const Discretization& d, int level, const VectorQuadratureField& f )
{
    require( f.level == level, "load data lives on another level" );
    const auto& geo   = d.geometry( level, f.degree );
    const auto& basis = basis_table( f.degree );
    const int   nq    = geo.num_points;
    Vector      y;
    element_apply(
        d, level, SpaceKind::P2Vector,
        [&]( int e, double* out ) {
            for ( int k = 0; k < 12; ++k )
                out[k] = 0.0;
            for ( int q = 0; q < nq; ++q )
            {
                const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
                const Vec2        w   = geo.weight[idx] * f.values[idx];
                for ( int k = 0; k < 6; ++k )
                {
                    out[k] += w.x() * basis.p2[q][k];
                    out[6 + k] += w.y() * basis.p2[q][k];
                }
            }
        },
        y );
    return y;
}

QuadratureField strain_rate_squared( const Discretization& d, int level, int degree, const Vector& u )
{
    const int n = d.num_nodes( SpaceKind::P2Vector, level );
    require( u.size() == 2 * n, "velocity does not match the P2 vector space" );
    const auto&     geo   = d.geometry( level, degree );
    const auto&     basis = basis_table( degree );
    const auto&     lm    = d.mesh().level( level );
    QuadratureField f;
    f.level      = level;
    f.degree     = basis.degree;
    f.num_points = geo.num_points;
    f.values.resize( geo.x.size() );
    const int nq = f.num_points;
#pragma omp parallel for schedule( static )
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        for ( int q = 0; q < nq; ++q )
        {
            const std::size_t idx = static_cast< std::size_t >( e ) * nq + q;
            Mat2              H   = Mat2::Zero();
            for ( int k = 0; k < 6; ++k )
            {
                const Vec2 g    = geo.inv_jacobian_t[idx] * basis.p2_grad[q][k];
                const int  node = lm.p2_nodes[e][k];
                H.row( 0 ) += u[node] * g.transpose();
                H.row( 1 ) += u[n + node] * g.transpose();
            }
            Mat2 eps = 0.5 * ( H + H.transpose() );
            eps -= 0.5 * H.trace() * Mat2::Identity();
            f.values[idx] = ( eps.array() * eps.array() ).sum();
        }
    }
    return f;
}

} // namespace tala::fem
