#pragma once

#include "tala/fem/coefficients.hpp"
#include "tala/fem/space.hpp"

#include <functional>
#include <string>

namespace tala::fem {

enum class OperatorTag
{
    ViscousBlock,
    Divergence,
    DensityGradient,
    Gradient,
    MassInvEta,
    MassSqrtEta,
    StiffInvSqrtEta,
    EnergyLHS,
    PlainMass,
    PlainStiffness
};

const char* to_string( OperatorTag tag );

/// Matrix-free bilinear form between two spaces of one level.
class FormOperator
{
 public:
    FormOperator( const Discretization& d, int level, OperatorTag tag, SpaceKind domain, SpaceKind range );
    virtual ~FormOperator() = default;

    OperatorTag    tag() const { return tag_; }
    int            level() const { return level_; }
    FunctionSpace  domain() const { return d_->space( domain_, level_ ); }
    FunctionSpace  range() const { return d_->space( range_, level_ ); }
    const Discretization& discretization() const { return *d_; }

    /// y = M x for the (never assembled) matrix of the form.
    virtual void apply( const Vector& x, Vector& y ) const = 0;

    /// Entries a(phi_i, phi_i); only for square forms.
    virtual Vector diagonal() const;

    Vector        operator()( const Vector& x ) const;
    FieldFunction apply( const FieldFunction& x ) const;
    LinearOperator linear_operator() const;

 protected:
    const Discretization* d_;
    int                   level_;
    OperatorTag           tag_;
    SpaceKind             domain_;
    SpaceKind             range_;

    void check_input( const Vector& x ) const;
};

/// 2 eta (eps(u) : eps(v) - div u div v / dim), P2 vector to P2 vector.
class ViscousOperator : public FormOperator
{
 public:
    ViscousOperator( const Discretization& d, int level, QuadratureField eta );
    using FormOperator::apply;
    void   apply( const Vector& x, Vector& y ) const override;
    Vector diagonal() const override;
    const QuadratureField& viscosity() const { return eta_; }

 private:
    QuadratureField eta_;
};

/// -(div u, q), P2 vector to P1.
class DivergenceOperator : public FormOperator
{
 public:
    DivergenceOperator( const Discretization& d, int level );
    using FormOperator::apply;
    void apply( const Vector& x, Vector& y ) const override;
};

/// Transpose of the divergence: -(p, div v), P1 to P2 vector.
class GradientOperator : public FormOperator
{
 public:
    GradientOperator( const Discretization& d, int level );
    using FormOperator::apply;
    void apply( const Vector& x, Vector& y ) const override;
};

/// -(grad ln rho . u, q), P2 vector to P1.
class DensityGradientOperator : public FormOperator
{
 public:
    DensityGradientOperator( const Discretization& d, int level, const std::function< Vec2( const Vec2& ) >& grad_ln_rho );
    using FormOperator::apply;
    void apply( const Vector& x, Vector& y ) const override;

 private:
    VectorQuadratureField grad_;
};

/// (c u, v) on P1, P2 or P2 vector.
class MassOperator : public FormOperator
{
 public:
    MassOperator( const Discretization& d, int level, SpaceKind kind, QuadratureField coefficient,
                  OperatorTag tag = OperatorTag::PlainMass );
    using FormOperator::apply;
    void   apply( const Vector& x, Vector& y ) const override;
    Vector diagonal() const override;

 private:
    QuadratureField c_;
};

/// (c grad u, grad v) on P1 or P2.
class StiffnessOperator : public FormOperator
{
 public:
    StiffnessOperator( const Discretization& d, int level, SpaceKind kind, QuadratureField coefficient,
                       OperatorTag tag = OperatorTag::PlainStiffness );
    using FormOperator::apply;
    void   apply( const Vector& x, Vector& y ) const override;
    Vector diagonal() const override;

 private:
    QuadratureField c_;
};

/// (m T, w) + (d grad T, grad w) + (b . grad T, w) on P2.
class TransportOperator : public FormOperator
{
 public:
    TransportOperator( const Discretization& d, int level, QuadratureField mass, QuadratureField diffusion,
                       VectorQuadratureField advection, OperatorTag tag = OperatorTag::EnergyLHS );
    using FormOperator::apply;
    void   apply( const Vector& x, Vector& y ) const override;
    Vector diagonal() const override;

 private:
    QuadratureField       m_;
    QuadratureField       k_;
    VectorQuadratureField b_;
};

/// Load vector (f, phi_i) for a scalar space and a function of x given at quadrature points.
Vector load_vector( const Discretization& d, int level, SpaceKind kind, const QuadratureField& f );

/// Load vector (f . phi_i) for the P2 vector space.
Vector vector_load( const Discretization& d, int level, const VectorQuadratureField& f );

/// Deviatoric strain rate double contraction eps(u):eps(u) at quadrature points.
QuadratureField strain_rate_squared( const Discretization& d, int level, int degree, const Vector& u );

} // namespace tala::fem
