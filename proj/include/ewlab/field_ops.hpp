#pragma once

#include "ewlab/grid.hpp"

namespace ewlab {

// Centered second-order first derivative along `axis` (1..3). The output is
// written wherever the stencil fits inside the allocated array; the outermost
// shell along the derivative axis is zero.
ScalarField partial_derivative(const ScalarField& f, int axis);
VectorField3 partial_derivative(const VectorField3& u, int axis);

ScalarField divergence(const VectorField3& u);
VectorField3 gradient(const ScalarField& f);

// Componentwise 7-point Laplacian.
VectorField3 vector_laplacian(const VectorField3& u);

// A u = c2^2 Lap(u) + (c1^2 - c2^2) grad(div u); requires c1^2 > (4/3) c2^2.
VectorField3 elastic_operator(const VectorField3& u, double c1, double c2);

// Quadrature with h^3 node weights over interior nodes only.
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField3& u);
double sup_norm(const ScalarField& f);                       // max |f| over interior
double sup_norm(const VectorField3& u);                      // max Euclidean |u| over interior
double weighted_l2(const ScalarField& f, const ScalarField& w);
double weighted_l2(const VectorField3& u, const ScalarField& w);
double integrate(const ScalarField& f);                      // h^3 * sum over interior

// In-place linear algebra on matching grids.
void axpy(double a, const ScalarField& x, ScalarField& y);   // y += a*x
void axpy(double a, const VectorField3& x, VectorField3& y);
void scale(double a, ScalarField& x);
void scale(double a, VectorField3& x);
ScalarField subtract(const ScalarField& a, const ScalarField& b);
VectorField3 subtract(const VectorField3& a, const VectorField3& b);
VectorField3 add(const VectorField3& a, const VectorField3& b);
VectorField3 scaled(const VectorField3& a, double s);

// Pointwise products.
VectorField3 multiply(const ScalarField& s, const VectorField3& u);
ScalarField multiply(const ScalarField& a, const ScalarField& b);

// Distance from the origin at every node.
ScalarField radius_field(const Grid& g);

}  // namespace ewlab
