#pragma once

// Bundled example systems, transcribed in code so library tests do not
// depend on the io layer.  The data/ files carry the same numbers; test_io
// cross-checks the two transcriptions against each other.

#include "cqlqg/model.hpp"

namespace cqlqg::fixtures {

inline PlantModel example8_plant() {
  Mat A(2, 2), B(2, 4), C(2, 2), D(2, 4), E(2, 2), F(2, 2), G(2, 2), d(2, 2);
  A << 0.9534, -1.1165, 0.4193, 1.8821;
  B << -1.7174, -0.2189, 1.9180, 0.5636, -0.6815, 1.3570, 0.2985, -0.3679;
  C << -1.3570, -0.2189, -0.6815, 1.7174;
  D << 1, 0, 0, 0, 0, 1, 0, 0;
  E << -0.3238, 0.2779, -1.1693, -0.5966;
  F << -0.8290, -0.9665, -1.8655, -0.0357;
  G << -0.2324, -0.1608, -0.5822, -1.0961;
  d << 1, 0, 0, 1;
  return PlantModel({2, 4, 2, 2, 2, 2}, A, B, C, D, E, F, G, d);
}

inline ControllerParams example8_optimum() {
  ControllerParams u;
  u.R.resize(2, 2);
  u.b.resize(2, 2);
  u.e.resize(2, 2);
  u.R << -0.5611, -1.5567, -1.5567, 1.8283;
  u.b << 1.8111, 0.7201, -1.4979, -3.9696;
  u.e << -0.1250, 4.9673, -4.4929, -1.3387;
  return u;
}

inline PlantModel example10_plant() {
  Mat A(2, 2), B(2, 4), C(2, 2), D(2, 4), E(2, 2), F(2, 2), G(2, 2), d(2, 2);
  A << 0.0, 0.1, -0.1, 0.0;
  B << 0, 0, 0, 0, 0, -0.2, 0, -0.2;
  C << 0.2, 0, 0, 0;
  D << 1, 0, 0, 0, 0, 1, 0, 0;
  E << 0, 0, 0, -0.2;
  F = Mat::Identity(2, 2);
  G = Mat::Identity(2, 2);
  d = Mat::Identity(2, 2);
  return PlantModel({2, 4, 2, 2, 2, 2}, A, B, C, D, E, F, G, d);
}

inline ControllerParams example10_optimum() {
  ControllerParams u;
  u.R.resize(2, 2);
  u.b.resize(2, 2);
  u.e.resize(2, 2);
  u.R << -0.2488, 0.0900, 0.0900, -0.0395;
  u.b << -0.1403, -0.2305, -0.0297, -0.8185;
  u.e << -0.3185, -0.0785, 0.1940, -0.3017;
  return u;
}

inline PlantModel example9_plant() {
  Mat A(4, 4), B(4, 8), C(4, 4), D(4, 8), E(4, 4), F(4, 4), G(4, 4), d(4, 4);
  A << -1.4350, 1.8015, 0.6224, -1.9677,
       4.2246, 1.0737, 0.0050, 0.7269,
       -2.2170, -1.2044, 0.8288, 0.8162,
       0.3659, 0.0671, -1.8571, 0.0519;
  B << 0.2260, 0.7044, -1.2687, -0.6255, -1.9870, 1.0095, -0.6543, -0.4582,
       -0.2949, 0.7202, -1.3567, -0.0782, -2.8180, 1.2571, 1.9406, 0.3029,
       1.1299, 0.2743, 0.5416, -0.0526, 0.2516, -0.1793, -0.4433, -0.9985,
       1.7793, 0.5586, 0.6810, 0.0559, -0.6919, -0.3315, -0.8624, 0.2582;
  C << -0.8595, 0.6913, 0.8501, -0.8178,
       -0.3597, 1.2905, -0.6205, 0.5116,
       -2.1776, 0.4383, 1.1181, -0.4056,
       -2.1282, 0.3051, -0.3811, -0.0535;
  D = Mat::Zero(4, 8);
  D.leftCols(4) = Mat::Identity(4, 4);
  E << 0.2872, 0.6462, -0.1964, -0.5563,
       -0.3272, 0.0165, 0.6345, -1.1129,
       1.0013, -0.7923, 0.1927, -0.8871,
       -0.3072, 0.1521, -0.4705, -1.2071;
  F << 0.3486, -0.2299, 1.2853, 1.1289,
       1.6087, -0.2542, 0.4107, 0.4351,
       1.0912, 0.5867, -0.9117, 1.0435,
       -1.5572, 3.2263, -0.4087, -1.4700;
  G << 0.8558, 1.9594, -1.6661, -0.7205,
       -1.3948, -1.1263, 0.9523, 0.2601,
       -0.2111, -1.8285, -0.1029, -0.9782,
       0.3339, -0.8670, -0.4206, 0.6536;
  d = Mat::Identity(4, 4);
  return PlantModel({4, 8, 4, 4, 4, 4}, A, B, C, D, E, F, G, d);
}

inline ControllerParams example9_optimum() {
  ControllerParams u;
  u.R.resize(4, 4);
  u.b.resize(4, 4);
  u.e.resize(4, 4);
  u.R << -3.0592, -8.3578, -2.1617, -6.4581,
         -8.3578, 20.8551, -2.6142, 12.1693,
         -2.1617, -2.6142, 10.2172, -4.5633,
         -6.4581, 12.1693, -4.5633, 5.8481;
  u.b << 0.4141, -2.4157, -1.7490, -2.8981,
         -0.2109, -0.0412, 2.3931, 1.3569,
         0.4802, -1.6943, -4.0817, -3.5863,
         0.3551, -0.1835, -3.3398, -2.3062;
  u.e << -14.3579, -12.2259, -25.2370, 2.1155,
         -5.1100, 9.9388, -12.8367, -4.9427,
         1.0033, -13.8569, -1.6189, 3.9519,
         13.7002, -1.8789, 10.8927, 0.9094;
  return u;
}

}  // namespace cqlqg::fixtures
