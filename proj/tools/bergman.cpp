#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bergman/bergman.hpp"

using namespace bergman;
using json = nlohmann::json;

namespace {

struct options {
  std::string geometry, input, moments, basis, out, svg, csv, header, report, lambda_csv;
  std::string method = "level";
  std::vector<double> grid;    // x0,x1,y0,y1,nx,ny
  std::vector<double> levels;
  int degree = -1;
  int n = -1;
  int precision = 256;
  int resolution = 400;
  int K = 12, M = 80;
  int m = 3, n_min = 38, n_max = 52;
  double r = 0.9;
};

void warn(const std::vector<std::string>& ws) {
  for (const auto& w : ws) std::cerr << "warning: " << w << "\n";
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    write_file_atomic(path, content);
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

grid_spec parse_grid(const std::vector<double>& g) {
  if (g.size() != 6) throw input_error("--grid expects x0,x1,y0,y1,nx,ny");
  grid_spec out{g[0], g[1], g[2], g[3], int(g[4]), int(g[5])};
  if (out.nx < 1 || out.ny < 1 || double(out.nx) != g[4] || double(out.ny) != g[5])
    throw input_error("--grid node counts must be positive integers");
  if (!(out.x1 >= out.x0 && out.y1 >= out.y0)) throw input_error("--grid ranges must be ordered");
  return out;
}

template <class F>
auto with_basis(const std::string& path, F&& f) {
  const auto j = read_json(path);
  const int bits = j.value("precision_bits", 256);
  return with_precision(bits, [&](auto tag) {
    using Real = decltype(tag);
    return f(basis_from_json<Real>(j));
  });
}

std::string lambda_table(const auto& b) {
  std::ostringstream os;
  os << "n,lambda\n";
  for (int k = 0; k <= b.degree; ++k) os << k << "," << to_string_full(b.lambda[k]) << "\n";
  return os.str();
}

std::string polylines_csv(const std::vector<polyline>& lines, double level) {
  return level_curves_to_csv({{level, lines}});
}

void cmd_moments(const options& o) {
  const auto arch = archipelago_from_json(read_json(o.geometry));
  with_precision(o.precision, [&](auto tag) {
    using Real = decltype(tag);
    auto mm = compute_moments<Real>(arch, o.degree);
    warn(mm.warnings);
    emit(o.out, moments_to_csv(mm));
    return 0;
  });
}

void cmd_radon(const options& o) {
  with_precision(o.precision, [&](auto tag) {
    using Real = decltype(tag);
    const auto samples = radon_from_csv<Real>(read_file(o.input));
    auto mm = real_to_complex_moments(radon_to_real_moments(samples, o.degree));
    check_positive_definite(mm);
    warn(mm.warnings);
    emit(o.out, moments_to_csv(mm));
    return 0;
  });
}

void cmd_basis(const options& o) {
  with_precision(o.precision, [&](auto tag) {
    using Real = decltype(tag);
    const auto mm = moments_from_csv<Real>(read_file(o.moments));
    const int n = o.degree >= 0 ? o.degree : mm.degree - 1;
    const auto b = orthonormalize(mm, n);
    std::cerr << "degree " << b.degree << ", orthonormality residual " << to_double(b.orthonormality_residual)
              << "\n";
    emit(o.out, basis_to_json(b).dump(1) + "\n");
    if (!o.lambda_csv.empty()) emit(o.lambda_csv, lambda_table(b));
    return 0;
  });
}

void cmd_zeros(const options& o) {
  with_basis(o.basis, [&](const auto& b) {
    const auto zs = zeros(b, o.n);
    warn(zs.warnings);
    emit(o.out, zeros_to_csv(zs));
    if (!o.svg.empty()) {
      std::vector<cplx> pts;
      for (const auto& z : zs.zeros) pts.push_back(to_double(z));
      const auto g = frame_around(pts, 1, 2);
      svg_document doc(g.x0, g.x1, g.y0, g.y1);
      for (const auto& z : pts) doc.add_point(z);
      emit(o.svg, doc.str());
    }
    return 0;
  });
}

void cmd_field(const options& o) {
  const auto grid = parse_grid(o.grid);
  with_basis(o.basis, [&](const auto& b) {
    const auto f = evaluate_field(b, grid, o.n);
    emit(o.out, field_to_csv(f));
    if (!o.header.empty()) emit(o.header, field_header(f).dump(1) + "\n");
    if (!o.svg.empty()) {
      if (grid.nx < 2 || grid.ny < 2) throw precondition_error("level curves need a grid of at least 2x2");
      const auto levels = o.levels.empty() ? default_levels(f) : o.levels;
      svg_document doc(grid.x0, grid.x1, grid.y0, grid.y1);
      doc.add_level_curves(extract_level_curves(f, levels, b));
      emit(o.svg, doc.str());
    }
    return 0;
  });
}

void cmd_reconstruct(const options& o) {
  if (o.method != "level" && o.method != "ridge") throw input_error("--method must be 'level' or 'ridge'");
  const auto method = o.method == "level" ? reconstruction_method::level : reconstruction_method::ridge;
  with_basis(o.basis, [&](const auto& b) {
    grid_spec grid;
    if (!o.grid.empty()) {
      grid = parse_grid(o.grid);
    } else {
      // square frame around the zeros of P_n, at least 1.5 equivalent radii wide
      std::vector<cplx> pts;
      for (const auto& z : zeros(b, o.n).zeros) pts.push_back(to_double(z));
      const double area = 1 / std::pow(to_double(b.lambda[0]), 2);
      grid = frame_around(pts, 1.5 * std::sqrt(area / std::acos(-1.0)), o.resolution);
    }
    const auto f = evaluate_field(b, grid, o.n);
    const auto rec = reconstruct_boundary(f, b, method);
    const auto& lines = rec.curves[0].lines;
    json rep{{"method", method_name(rec.method)},
             {"level", rec.level},
             {"curves", lines.size()},
             {"frame", {grid.x0, grid.x1, grid.y0, grid.y1, grid.nx, grid.ny}}};
    int closed = 0;
    for (const auto& pl : lines) closed += pl.closed;
    rep["closed_curves"] = closed;
    if (!o.geometry.empty()) rep["hausdorff"] = hausdorff_to_boundary(lines, archipelago_from_json(read_json(o.geometry)));
    std::cout << rep.dump() << "\n";
    if (!o.csv.empty()) emit(o.csv, polylines_csv(lines, rec.level));
    if (!o.svg.empty()) {
      svg_document doc(grid.x0, grid.x1, grid.y0, grid.y1);
      doc.add_level_curves(rec.curves);
      emit(o.svg, doc.str());
    }
    return 0;
  });
}

void cmd_green(const options& o) {
  const auto arch = archipelago_from_json(read_json(o.geometry));
  std::vector<disk> disks;
  for (const auto& is : arch.islands) {
    const auto* d = std::get_if<disk>(&is);
    if (!d) throw precondition_error("green: only disk archipelagos are supported");
    disks.push_back(*d);
  }
  const auto gm = fit_green(disks, o.K, o.M);
  emit(o.out, green_to_json(gm).dump(1) + "\n");

  const auto ps = periods(gm);
  json rep{{"capacity", gm.capacity()}, {"K", gm.K}, {"residual", gm.residual}, {"b", ps.b}, {"flux", ps.flux}};
  std::vector<double> levels = o.levels;
  if (gm.size() >= 2) {
    const auto cl = critical_levels(gm);
    json saddles = json::array();
    for (const auto& s : cl.saddles)
      saddles.push_back({{"z", {s.z.real(), s.z.imag()}}, {"R", s.level}, {"islands", s.islands}});
    rep["saddles"] = saddles;
    rep["R_prime"] = cl.r_prime;
    rep["R_double_prime"] = cl.r_double_prime;
    rep["R_j"] = cl.island_levels;
    if (levels.empty()) levels = {1 + (cl.r_prime - 1) / 2, 1.2 * cl.r_double_prime};
  } else if (levels.empty()) {
    levels = {1.5, 2};
  }
  if (!o.report.empty())
    emit(o.report, rep.dump(1) + "\n");
  else
    std::cout << rep.dump() << "\n";
  if (!o.svg.empty() || !o.csv.empty()) {
    level_curve_set set;
    for (double R : levels) set.push_back({R, level_curve(gm, R, level_curve_options{o.resolution, true})});
    if (!o.csv.empty()) emit(o.csv, level_curves_to_csv(set));
    if (!o.svg.empty()) {
      const auto g = green_frame(gm, *std::max_element(levels.begin(), levels.end()), 2);
      svg_document doc(g.x0, g.x1, g.y0, g.y1);
      for (const auto& d : disks) doc.add_polyline(polyline{sample_boundary(d, 256), true}, 1.0, "#000000");
      doc.add_level_curves(set);
      emit(o.svg, doc.str());
    }
  }
}

void cmd_lemniscate(const options& o) {
  const lemniscate_spec spec{o.m, o.r};
  spec.check();
  if (o.n_min < 0 || o.n_max < o.n_min) throw input_error("need 0 <= n-min <= n-max");
  with_precision(o.precision, [&](auto tag) {
    using Real = decltype(tag);
    const auto b = orthonormalize(compute_moments<Real>(lemniscate_archipelago(o.m, o.r), o.n_max + 1), o.n_max);
    const int K = o.n_max / o.m + 2;
    std::vector<szego_basis<mp256>> sz;
    for (int s = 0; s + 1 < o.m; ++s) sz.push_back(lemniscate_szego<mp256>(spec, s, K));
    std::ostringstream os;
    os.precision(10);
    os << "n,k,s,lambda_pipeline,lambda_oracle,relative_difference,normalized,limit\n";
    for (int n = o.n_min; n <= o.n_max; ++n) {
      const int k = n / o.m, s = n % o.m;
      const double pipeline = to_double(b.lambda[n]);
      double oracle = NAN;
      if (s == o.m - 1)
        oracle = to_double(exact_top_subsequence<mp256>(spec, k).lambda);
      else {
        try {
          oracle = to_double(lambda_from_szego(spec, s, k, sz[s]));
        } catch (const error& e) {
          std::cerr << "warning: n=" << n << ": " << e.what() << "\n";
        }
      }
      const double normalized = pipeline * std::pow(o.r, n + 1) * std::sqrt(std::acos(-1.0) / (n + 1));
      os << n << "," << k << "," << s << "," << pipeline << "," << oracle << "," << std::scientific << std::setprecision(3)
         << std::abs(pipeline / oracle - 1) << std::defaultfloat << std::setprecision(10) << "," << normalized << "," << predict_lambda_limit(spec, s) << "\n";
    }
    emit(o.out, os.str());
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman polynomials of archipelagos: moments, bases, zeros, Christoffel fields and Green functions"};
  app.require_subcommand(1);
  options o;
  auto precision = [&](CLI::App* c) {
    c->add_option("--precision", o.precision, "working precision in bits (53, 128, 256, 512)")
        ->check(CLI::IsMember({53, 128, 256, 512}));
  };

  auto* moments = app.add_subcommand("moments", "archipelago JSON -> moment CSV");
  moments->add_option("--geometry", o.geometry, "archipelago JSON")->required()->check(CLI::ExistingFile);
  moments->add_option("--degree", o.degree, "largest power in each variable")->required()->check(CLI::NonNegativeNumber);
  moments->add_option("-o,--out", o.out, "moment CSV (default stdout)");
  precision(moments);

  auto* radon = app.add_subcommand("radon-import", "projection moment CSV (theta,k,a) -> moment CSV");
  radon->add_option("--input", o.input, "projection CSV")->required()->check(CLI::ExistingFile);
  radon->add_option("--degree", o.degree, "largest projection order k")->required()->check(CLI::NonNegativeNumber);
  radon->add_option("-o,--out", o.out, "moment CSV (default stdout)");
  precision(radon);

  auto* basis = app.add_subcommand("basis", "moment CSV -> basis JSON");
  basis->add_option("--moments", o.moments, "moment CSV")->required()->check(CLI::ExistingFile);
  basis->add_option("--degree", o.degree, "basis degree (default: moment degree - 1)");
  basis->add_option("-o,--out", o.out, "basis JSON (default stdout)");
  basis->add_option("--lambda-csv", o.lambda_csv, "table of leading coefficients");
  precision(basis);

  auto* zs = app.add_subcommand("zeros", "zeros of P_n");
  zs->add_option("--basis", o.basis, "basis JSON")->required()->check(CLI::ExistingFile);
  zs->add_option("-n", o.n, "polynomial degree")->required();
  zs->add_option("-o,--out", o.out, "zero CSV (default stdout)");
  zs->add_option("--svg", o.svg, "scatter plot");

  auto* field = app.add_subcommand("field", "Christoffel field Lambda_n on a grid");
  field->add_option("--basis", o.basis, "basis JSON")->required()->check(CLI::ExistingFile);
  field->add_option("-n", o.n, "degree")->required();
  field->add_option("--grid", o.grid, "x0,x1,y0,y1,nx,ny")->required()->delimiter(',');
  field->add_option("--levels", o.levels, "contour levels (default: 12 geometric levels)")->delimiter(',');
  field->add_option("-o,--out", o.out, "field CSV (default stdout)");
  field->add_option("--header", o.header, "field JSON header");
  field->add_option("--svg", o.svg, "level curve plot");

  auto* rec = app.add_subcommand("reconstruct", "boundary reconstruction from a basis");
  rec->add_option("--basis", o.basis, "basis JSON")->required()->check(CLI::ExistingFile);
  rec->add_option("-n", o.n, "degree")->required();
  rec->add_option("--method", o.method, "level or ridge");
  rec->add_option("--grid", o.grid, "x0,x1,y0,y1,nx,ny (default: frame around the zeros)")->delimiter(',');
  rec->add_option("--resolution", o.resolution, "nodes per axis of the automatic frame")->check(CLI::PositiveNumber);
  rec->add_option("--geometry", o.geometry, "true archipelago, to report the Hausdorff distance")->check(CLI::ExistingFile);
  rec->add_option("--csv", o.csv, "polyline CSV");
  rec->add_option("--svg", o.svg, "polyline plot");

  auto* green = app.add_subcommand("green", "Green function of a disk archipelago");
  green->add_option("--geometry", o.geometry, "archipelago JSON of disks")->required()->check(CLI::ExistingFile);
  green->add_option("-K", o.K, "Laurent terms per disk")->check(CLI::NonNegativeNumber);
  green->add_option("-M", o.M, "collocation nodes per disk")->check(CLI::PositiveNumber);
  green->add_option("-o,--out", o.out, "Green model JSON (default stdout)");
  green->add_option("--report", o.report, "periods and critical levels JSON (default stdout)");
  green->add_option("--levels", o.levels, "values R of the level curves")->delimiter(',');
  green->add_option("--resolution", o.resolution, "nodes per axis for level curves")->check(CLI::PositiveNumber);
  green->add_option("--csv", o.csv, "level curve CSV");
  green->add_option("--svg", o.svg, "level curve plot");

  auto* lem = app.add_subcommand("lemniscate-check", "pipeline against the lemniscate oracles");
  lem->add_option("-m", o.m, "number of islands");
  lem->add_option("-r", o.r, "radius parameter, 0 < r < 1");
  lem->add_option("--n-min", o.n_min, "first degree");
  lem->add_option("--n-max", o.n_max, "last degree");
  lem->add_option("-o,--out", o.out, "report CSV (default stdout)");
  o.precision = 256;
  precision(lem);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*moments) cmd_moments(o);
    else if (*radon) cmd_radon(o);
    else if (*basis) cmd_basis(o);
    else if (*zs) cmd_zeros(o);
    else if (*field) cmd_field(o);
    else if (*rec) cmd_reconstruct(o);
    else if (*green) cmd_green(o);
    else if (*lem) cmd_lemniscate(o);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
