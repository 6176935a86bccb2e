#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace tala {

using Vector = Eigen::VectorXd;
using Vec2   = Eigen::Vector2d;
using Mat2   = Eigen::Matrix2d;

/// Linear map y = L(x); y is resized by the callee.
using LinearOperator = std::function< void( const Vector& x, Vector& y ) >;

/// In-place projection onto a constrained subspace.
using Projection = std::function< void( Vector& x ) >;

/// Raised when a caller breaks a documented precondition (level/space mismatch, bad sizes).
class ContractViolation : public std::logic_error
{
 public:
    explicit ContractViolation( const std::string& what )
    : std::logic_error( what )
    {}
};

inline void require( bool condition, const char* message )
{
    if ( !condition )
    {
        throw ContractViolation( message );
    }
}

} // namespace tala
