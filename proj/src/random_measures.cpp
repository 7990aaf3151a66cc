#include "wolffkit/random_measures.hpp"

namespace wolffkit {

double MeasureSampler::uniform(double lo, double hi) {
  double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Point MeasureSampler::point_in_cube(int dim, double half_width) {
  Point p(dim);
  for (double& c : p) c = uniform(-half_width, half_width);
  return p;
}

Measure MeasureSampler::dirac_sum(int dim, int count, double half_width) {
  std::vector<Atom> atoms;
  for (int i = 0; i < count; ++i) {
    Point x = point_in_cube(dim, half_width);
    atoms.push_back(Atom{std::move(x), uniform(0.1, 1.0)});
  }
  return Measure::dirac_sum(dim, std::move(atoms));
}

Measure MeasureSampler::ball_cloud(int dim, int count, double half_width, double r_lo, double r_hi) {
  std::vector<UniformBall> balls;
  for (int i = 0; i < count; ++i) {
    UniformBall b;
    b.center = point_in_cube(dim, half_width);
    b.radius = uniform(r_lo, r_hi);
    b.weight = uniform(0.1, 1.0);
    balls.push_back(std::move(b));
  }
  return Measure::ball_cloud(dim, std::move(balls));
}

}  // namespace wolffkit
