// Command-line surface for the rotational wave-packet toolkit: build packets,
// evolve them, analyse fractional revivals, and emit carpet/snapshot
// artifacts.  Exit codes: 0 ok, 1 domain error, 2 usage, 3 I/O.

#include <algorithm>
#include <complex>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotwave/rotwave.hpp"

namespace {

using rotwave::detail::format_double;
using rotwave::detail::HeaderList;

struct GlobalFlags {
  int workers = 1;
  std::uint64_t seed = 0;
};

std::string canonical_config(const std::string& cmd,
                             std::vector<std::pair<std::string, std::string>> params) {
  std::sort(params.begin(), params.end());
  std::string s = cmd;
  for (const auto& [k, v] : params) {
    s += ' ';
    s += k;
    s += '=';
    s += v;
  }
  return s;
}

// Provenance carried by every artifact.  Execution details (worker count,
// output locations) stay out so reruns produce identical bytes.
HeaderList provenance(const std::string& cmd,
                      const std::vector<std::pair<std::string, std::string>>& params) {
  const std::string config = canonical_config(cmd, params);
  HeaderList h;
  h.emplace_back("tool", std::string(rotwave::kToolName) + " " + rotwave::kToolVersion);
  h.emplace_back("command", cmd);
  h.emplace_back("config", config);
  h.emplace_back("config-hash", rotwave::detail::hex64(rotwave::detail::fnv1a(config)));
  return h;
}

struct ModelFlags {
  std::string model = "rigid";
  double omega0 = 1.0;
  double a = 1.0;
  double b = 0.0;
  std::string levels_path;
};

void add_model_flags(CLI::App* sub, ModelFlags& f) {
  sub->add_option("--model", f.model, "energy model: rigid | poly | levels")
      ->check(CLI::IsMember({"rigid", "poly", "levels"}));
  sub->add_option("--omega0", f.omega0, "rigid rotor: E = omega0 I(I+1)");
  sub->add_option("--a", f.a, "polynomial: E = a x + b x^2 with x = I(I+1)");
  sub->add_option("--b", f.b, "polynomial quadratic coefficient");
  sub->add_option("--levels", f.levels_path, "level file for the tabulated model");
}

rotwave::EnergyModel make_model(const ModelFlags& f) {
  if (f.model == "rigid") {
    if (!(f.omega0 > 0.0)) throw std::invalid_argument("--omega0 must be positive");
    return rotwave::RigidRotor{f.omega0};
  }
  if (f.model == "poly") return rotwave::PolynomialEnergy{f.a, f.b, "internal"};
  if (f.levels_path.empty())
    throw std::invalid_argument("--levels is required for the tabulated model");
  return rotwave::read_levels(f.levels_path);
}

void append_model_params(const ModelFlags& f,
                         std::vector<std::pair<std::string, std::string>>& params) {
  params.emplace_back("model", f.model);
  if (f.model == "rigid") params.emplace_back("omega0", format_double(f.omega0));
  if (f.model == "poly") {
    params.emplace_back("a", format_double(f.a));
    params.emplace_back("b", format_double(f.b));
  }
  if (f.model == "levels") params.emplace_back("levels", f.levels_path);
}

rotwave::ArtifactFormat parse_image_format(const std::string& s) {
  return s == "ppm" ? rotwave::ArtifactFormat::Ppm : rotwave::ArtifactFormat::Pgm;
}

void write_report(const std::string& path, const HeaderList& headers,
                  const std::vector<std::pair<std::string, std::string>>& body) {
  if (path.empty()) {
    rotwave::detail::write_headers(std::cout, headers);
    for (const auto& [k, v] : body) std::cout << k << ": " << v << "\n";
    return;
  }
  auto f = rotwave::detail::open_output(path);
  rotwave::detail::write_headers(f, headers);
  for (const auto& [k, v] : body) f << k << ": " << v << "\n";
  rotwave::detail::finish_output(f, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotational wave-packet revival toolkit"};
  app.set_version_flag("--version", std::string(rotwave::kToolName) + " " + rotwave::kToolVersion);
  app.require_subcommand(1);

  GlobalFlags global;
  app.add_option("--workers", global.workers, "worker threads for grid evaluation")
      ->check(CLI::Range(1, 256));
  app.add_option("--seed", global.seed, "seed for synthetic generators");

  // ---- build ----------------------------------------------------------
  auto build_n = std::make_shared<double>(0.0);
  auto build_eta = std::make_shared<double>(1.0);
  auto build_symmetric = std::make_shared<bool>(false);
  auto build_eps = std::make_shared<double>(1e-12);
  auto build_cap = std::make_shared<int>(0);
  auto build_out = std::make_shared<std::string>("coeffs.txt");
  {
    auto* sub = app.add_subcommand("build", "construct a wave packet coefficient file");
    sub->add_option("--n", *build_n, "localisation parameter N")->required();
    sub->add_option("--eta", *build_eta, "squeezing parameter in [0, 1]");
    sub->add_flag("--symmetric", *build_symmetric, "superpose with the antipodal image");
    sub->add_option("--epsilon", *build_eps, "truncation weight threshold");
    sub->add_option("--i-cap", *build_cap, "hard angular-momentum cap (0: 4N+40)");
    sub->add_option("-o,--out", *build_out, "coefficient file to write");
    sub->callback([=] {
      rotwave::WavePacketSpec spec;
      spec.n = *build_n;
      spec.eta = *build_eta;
      spec.symmetry = *build_symmetric ? rotwave::Symmetry::Symmetric
                                       : rotwave::Symmetry::Asymmetric;
      spec.truncation = {*build_eps, *build_cap};
      spec.validate();
      rotwave::SHExpansion wp = (*build_eta == 0.0)
                                    ? rotwave::build_linear(*build_n, spec.truncation)
                                    : rotwave::build_asymmetric(spec);
      if (*build_symmetric) wp = rotwave::symmetrize(wp, spec);
      const auto prov = provenance("build", {{"n", format_double(*build_n)},
                                             {"eta", format_double(*build_eta)},
                                             {"symmetric", *build_symmetric ? "1" : "0"},
                                             {"epsilon", format_double(*build_eps)},
                                             {"i-cap", std::to_string(*build_cap)}});
      rotwave::write_coefficients(*build_out, wp, prov);
    });
  }

  // ---- observe --------------------------------------------------------
  auto observe_in = std::make_shared<std::string>();
  auto observe_out = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("observe", "angular-momentum observables of a packet");
    sub->add_option("--in", *observe_in, "coefficient file")->required();
    sub->add_option("-o,--out", *observe_out, "report file (default: stdout)");
    sub->callback([=] {
      const auto wp = rotwave::read_coefficients(*observe_in);
      const auto o = rotwave::observables(wp);
      const auto prov = provenance("observe", {{"in", *observe_in}});
      write_report(*observe_out, prov,
                   {{"lx", format_double(o.lx)},
                    {"ly", format_double(o.ly)},
                    {"lz", format_double(o.lz)},
                    {"var-lx", format_double(o.var_lx)},
                    {"var-ly", format_double(o.var_ly)},
                    {"l2", format_double(o.l2)},
                    {"i-bar", format_double(o.i_bar)}});
    });
  }

  // ---- evolve ---------------------------------------------------------
  auto evolve_in = std::make_shared<std::string>();
  auto evolve_t = std::make_shared<double>(0.0);
  auto evolve_abs = std::make_shared<bool>(false);
  auto evolve_model = std::make_shared<ModelFlags>();
  auto evolve_out = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("evolve", "propagate a packet to one time");
    sub->add_option("--in", *evolve_in, "coefficient file")->required();
    sub->add_option("--t", *evolve_t, "time in units of T_rev (see --absolute-time)")->required();
    sub->add_flag("--absolute-time", *evolve_abs, "interpret --t in internal units instead");
    add_model_flags(sub, *evolve_model);
    sub->add_option("-o,--out", *evolve_out, "coefficient file to write")->required();
    sub->callback([=] {
      const auto wp = rotwave::read_coefficients(*evolve_in);
      const auto model = make_model(*evolve_model);
      double t = *evolve_t;
      if (!*evolve_abs) t *= rotwave::time_scales(model, rotwave::i_bar(wp)).t_rev;
      auto out = rotwave::evolve(wp, model, t);
      std::vector<std::pair<std::string, std::string>> params{
          {"in", *evolve_in},
          {"t", format_double(*evolve_t)},
          {"absolute-time", *evolve_abs ? "1" : "0"}};
      append_model_params(*evolve_model, params);
      rotwave::write_coefficients(*evolve_out, out, provenance("evolve", params));
    });
  }

  // ---- schedule -------------------------------------------------------
  auto sched_m = std::make_shared<int>(0);
  auto sched_n = std::make_shared<int>(0);
  auto sched_parity = std::make_shared<std::string>("all");
  auto sched_out = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("schedule", "fractional-revival amplitudes at t = (m/n) T_rev");
    sub->add_option("--m", *sched_m, "numerator")->required();
    sub->add_option("--n", *sched_n, "denominator")->required();
    sub->add_option("--parity", *sched_parity, "I content: all | even")
        ->check(CLI::IsMember({"all", "even"}));
    sub->add_option("-o,--out", *sched_out, "table file (default: stdout)");
    sub->callback([=] {
      const rotwave::RationalTime rt(*sched_m, *sched_n);
      const auto parity =
          *sched_parity == "even" ? rotwave::Parity::EvenIOnly : rotwave::Parity::AllI;
      const auto sch = rotwave::schedule(rt, parity);
      const auto prov = provenance("schedule", {{"m", std::to_string(*sched_m)},
                                                {"n", std::to_string(*sched_n)},
                                                {"parity", *sched_parity}});
      if (sched_out->empty()) {
        rotwave::write_schedule(std::cout, rt, sch, prov);
      } else {
        auto f = rotwave::detail::open_output(*sched_out);
        rotwave::write_schedule(f, rt, sch, prov);
        rotwave::detail::finish_output(f, *sched_out);
      }
    });
  }

  // ---- fractions ------------------------------------------------------
  auto frac_in = std::make_shared<std::string>();
  auto frac_m = std::make_shared<int>(0);
  auto frac_n = std::make_shared<int>(0);
  auto frac_omega0 = std::make_shared<double>(1.0);
  auto frac_prefix = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("fractions",
                                   "decompose a packet into fractional waves at t = (m/n) T_rev");
    sub->add_option("--in", *frac_in, "coefficient file")->required();
    sub->add_option("--m", *frac_m, "numerator")->required();
    sub->add_option("--n", *frac_n, "denominator")->required();
    sub->add_option("--omega0", *frac_omega0, "rigid rotor omega0");
    sub->add_option("--out-prefix", *frac_prefix, "prefix for output files")->required();
    sub->callback([=] {
      const auto wp = rotwave::read_coefficients(*frac_in);
      const rotwave::RationalTime rt(*frac_m, *frac_n);
      const rotwave::EnergyModel model = rotwave::RigidRotor{*frac_omega0};
      const auto waves = rotwave::fractional_waves(wp, rt, model);
      const auto parity = rotwave::has_only_even_i(wp) ? rotwave::Parity::EvenIOnly
                                                       : rotwave::Parity::AllI;
      const auto sch = rotwave::schedule(rt, parity);

      // recombine and compare against direct evolution as a built-in check
      const double t_rev = rotwave::time_scales(model, rotwave::i_bar(wp)).t_rev;
      const auto direct = rotwave::evolve(wp, model, rt.fraction() * t_rev);
      rotwave::SHExpansion sum = wp;
      for (auto& c : sum.coeffs) c.b = 0.0;
      for (const auto& w : waves)
        for (std::size_t k = 0; k < sum.coeffs.size(); ++k)
          sum.coeffs[k].b += w.amplitude * w.state.coeffs[k].b;
      const double residual = rotwave::max_coefficient_difference(sum, direct);

      const std::vector<std::pair<std::string, std::string>> params{
          {"in", *frac_in},
          {"m", std::to_string(*frac_m)},
          {"n", std::to_string(*frac_n)},
          {"omega0", format_double(*frac_omega0)}};
      const auto prov = provenance("fractions", params);
      for (const auto& w : waves) {
        auto state = w.state;
        rotwave::set_meta(state, "fractional-s", std::to_string(w.s));
        rotwave::write_coefficients(*frac_prefix + "-s" + std::to_string(w.s) + ".txt", state,
                                    prov);
      }
      std::vector<std::pair<std::string, std::string>> body{
          {"parity", rotwave::parity_name(parity)},
          {"l", std::to_string(sch.l)},
          {"q", std::to_string(sch.q)},
          {"reconstruction-residual", format_double(residual)}};
      for (const auto& w : waves)
        body.emplace_back("a[" + std::to_string(w.s) + "]",
                          format_double(w.amplitude.real()) + " " +
                              format_double(w.amplitude.imag()));
      write_report(*frac_prefix + "-summary.txt", prov, body);
    });
  }

  // ---- carpet ---------------------------------------------------------
  auto carpet_in = std::make_shared<std::string>();
  auto carpet_cut = std::make_shared<std::string>("equatorial");
  auto carpet_tmin = std::make_shared<double>(0.0);
  auto carpet_tmax = std::make_shared<double>(0.5);
  auto carpet_ts = std::make_shared<int>(128);
  auto carpet_as = std::make_shared<int>(256);
  auto carpet_model = std::make_shared<ModelFlags>();
  auto carpet_csv = std::make_shared<std::string>();
  auto carpet_image = std::make_shared<std::string>();
  auto carpet_imgfmt = std::make_shared<std::string>("pgm");
  auto carpet_log = std::make_shared<bool>(false);
  auto carpet_decades = std::make_shared<int>(6);
  auto carpet_annotate = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("carpet", "probability density over (angle, time)");
    sub->add_option("--in", *carpet_in, "coefficient file")->required();
    sub->add_option("--theta-cut", *carpet_cut, "equatorial (phi at theta=pi/2) | ring (theta)")
        ->check(CLI::IsMember({"equatorial", "ring"}));
    sub->add_option("--t-min", *carpet_tmin, "start time, units of T_rev");
    sub->add_option("--t-max", *carpet_tmax, "end time, units of T_rev");
    sub->add_option("--t-samples", *carpet_ts, "time samples");
    sub->add_option("--angle-samples", *carpet_as, "angle samples");
    add_model_flags(sub, *carpet_model);
    sub->add_option("--csv", *carpet_csv, "CSV matrix output path");
    sub->add_option("--image", *carpet_image, "heatmap image output path");
    sub->add_option("--image-format", *carpet_imgfmt, "pgm (gray) | ppm (colour)")
        ->check(CLI::IsMember({"pgm", "ppm"}));
    sub->add_flag("--log-scale", *carpet_log, "logarithmic intensity mapping");
    sub->add_option("--log-decades", *carpet_decades, "dynamic range of the log mapping");
    sub->add_option("--annotate", *carpet_annotate, "write the revival-window table here");
    sub->callback([=, &global] {
      if (carpet_csv->empty() && carpet_image->empty() && carpet_annotate->empty())
        throw std::invalid_argument("carpet: request at least one of --csv/--image/--annotate");
      const auto wp = rotwave::read_coefficients(*carpet_in);
      const auto model = make_model(*carpet_model);
      rotwave::CarpetSpec cs;
      cs.kind = *carpet_cut == "ring" ? rotwave::CarpetKind::RingProfile
                                      : rotwave::CarpetKind::EquatorialCut;
      cs.angle_samples = *carpet_as;
      cs.t_samples = *carpet_ts;
      cs.t_begin = *carpet_tmin;
      cs.t_end = *carpet_tmax;
      cs.workers = global.workers;
      const auto grid = rotwave::carpet(wp, model, cs);

      std::vector<std::pair<std::string, std::string>> params{
          {"in", *carpet_in},
          {"theta-cut", *carpet_cut},
          {"t-min", format_double(*carpet_tmin)},
          {"t-max", format_double(*carpet_tmax)},
          {"t-samples", std::to_string(*carpet_ts)},
          {"angle-samples", std::to_string(*carpet_as)},
          {"log-scale", *carpet_log ? "1" : "0"}};
      append_model_params(*carpet_model, params);
      rotwave::EmitOptions opt;
      opt.log_scale = *carpet_log;
      opt.log_decades = *carpet_decades;
      opt.extra_headers = provenance("carpet", params);
      if (!carpet_csv->empty()) rotwave::emit(grid, rotwave::ArtifactFormat::Csv, *carpet_csv, opt);
      if (!carpet_image->empty())
        rotwave::emit(grid, parse_image_format(*carpet_imgfmt), *carpet_image, opt);
      if (!carpet_annotate->empty()) {
        auto f = rotwave::detail::open_output(*carpet_annotate);
        auto headers = opt.extra_headers;
        headers.emplace_back("columns", "m n q-all q-even");
        rotwave::detail::write_headers(f, headers);
        for (const auto& w : rotwave::revival_windows(24))
          f << w.m << " " << w.n << " " << w.q_all << " " << w.q_even << "\n";
        rotwave::detail::finish_output(f, *carpet_annotate);
      }
    });
  }

  // ---- snapshot -------------------------------------------------------
  auto snap_in = std::make_shared<std::string>();
  auto snap_t = std::make_shared<double>(0.0);
  auto snap_ths = std::make_shared<int>(181);
  auto snap_phs = std::make_shared<int>(360);
  auto snap_offset = std::make_shared<double>(0.0);
  auto snap_model = std::make_shared<ModelFlags>();
  auto snap_csv = std::make_shared<std::string>();
  auto snap_image = std::make_shared<std::string>();
  auto snap_imgfmt = std::make_shared<std::string>("pgm");
  auto snap_log = std::make_shared<bool>(false);
  {
    auto* sub = app.add_subcommand("snapshot", "full |Psi|^2 mesh at one time");
    sub->add_option("--in", *snap_in, "coefficient file")->required();
    sub->add_option("--t", *snap_t, "time in units of T_rev")->required();
    sub->add_option("--theta-samples", *snap_ths, "theta samples");
    sub->add_option("--phi-samples", *snap_phs, "phi samples");
    sub->add_option("--phi-offset", *snap_offset, "phi of the first column (rad)");
    add_model_flags(sub, *snap_model);
    sub->add_option("--csv", *snap_csv, "CSV matrix output path");
    sub->add_option("--image", *snap_image, "heatmap image output path");
    sub->add_option("--image-format", *snap_imgfmt, "pgm | ppm")
        ->check(CLI::IsMember({"pgm", "ppm"}));
    sub->add_flag("--log-scale", *snap_log, "logarithmic intensity mapping");
    sub->callback([=, &global] {
      if (snap_csv->empty() && snap_image->empty())
        throw std::invalid_argument("snapshot: request at least one of --csv/--image");
      const auto wp = rotwave::read_coefficients(*snap_in);
      const auto model = make_model(*snap_model);
      rotwave::SnapshotSpec ss;
      ss.theta_samples = *snap_ths;
      ss.phi_samples = *snap_phs;
      ss.t = *snap_t;
      ss.phi_offset = *snap_offset;
      ss.workers = global.workers;
      const auto grid = rotwave::snapshot(wp, model, ss);
      std::vector<std::pair<std::string, std::string>> params{
          {"in", *snap_in},
          {"t", format_double(*snap_t)},
          {"theta-samples", std::to_string(*snap_ths)},
          {"phi-samples", std::to_string(*snap_phs)},
          {"phi-offset", format_double(*snap_offset)},
          {"log-scale", *snap_log ? "1" : "0"}};
      append_model_params(*snap_model, params);
      rotwave::EmitOptions opt;
      opt.log_scale = *snap_log;
      opt.extra_headers = provenance("snapshot", params);
      if (!snap_csv->empty()) rotwave::emit(grid, rotwave::ArtifactFormat::Csv, *snap_csv, opt);
      if (!snap_image->empty())
        rotwave::emit(grid, parse_image_format(*snap_imgfmt), *snap_image, opt);
    });
  }

  // ---- ce-ingest ------------------------------------------------------
  auto ce_amps = std::make_shared<std::string>();
  auto ce_synth = std::make_shared<bool>(false);
  auto ce_center = std::make_shared<double>(10.0);
  auto ce_width = std::make_shared<double>(2.0);
  auto ce_cap = std::make_shared<int>(0);
  auto ce_noise = std::make_shared<double>(0.0);
  auto ce_note = std::make_shared<std::string>();
  auto ce_out = std::make_shared<std::string>();
  auto ce_amps_out = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("ce-ingest",
                                   "build a packet from excitation amplitudes (file or synthetic)");
    sub->add_option("--amplitudes", *ce_amps, "amplitude file to ingest");
    sub->add_flag("--synthetic", *ce_synth, "generate a synthetic gaussian amplitude profile");
    sub->add_option("--center", *ce_center, "synthetic profile centre in I");
    sub->add_option("--width", *ce_width, "synthetic profile width in I");
    sub->add_option("--i-cap", *ce_cap, "synthetic profile cap (0: centre + 8 widths)");
    sub->add_option("--noise-sigma", *ce_noise, "additive noise on synthetic amplitudes");
    sub->add_option("--source-note", *ce_note, "free-text source tag for the metadata");
    sub->add_option("-o,--out", *ce_out, "coefficient file to write")->required();
    sub->add_option("--amplitudes-out", *ce_amps_out, "also write the amplitude file here");
    sub->callback([=, &global] {
      if (ce_amps->empty() == !*ce_synth)
        throw std::invalid_argument("ce-ingest: give exactly one of --amplitudes or --synthetic");
      rotwave::CEAmplitudeSet set;
      std::vector<std::pair<std::string, std::string>> params;
      if (*ce_synth) {
        set = rotwave::synthetic_amplitudes(*ce_center, *ce_width, *ce_cap, *ce_noise,
                                            global.seed);
        params = {{"synthetic", "1"},
                  {"center", format_double(*ce_center)},
                  {"width", format_double(*ce_width)},
                  {"i-cap", std::to_string(*ce_cap)},
                  {"noise-sigma", format_double(*ce_noise)},
                  {"seed", std::to_string(global.seed)}};
      } else {
        set = rotwave::read_amplitudes(*ce_amps);
        params = {{"amplitudes", *ce_amps}};
      }
      if (!ce_note->empty()) set.source_note = *ce_note;
      const auto prov = provenance("ce-ingest", params);
      if (!ce_amps_out->empty()) rotwave::write_amplitudes(*ce_amps_out, set, prov);
      auto wp = rotwave::expansion_from_amplitudes(set);
      rotwave::write_coefficients(*ce_out, wp, prov);
    });
  }

  // ---- fit-levels -----------------------------------------------------
  auto fit_levels_path = std::make_shared<std::string>();
  auto fit_out = std::make_shared<std::string>();
  {
    auto* sub = app.add_subcommand("fit-levels", "two-parameter fit E = a x + b x^2, x = I(I+1)");
    sub->add_option("--levels", *fit_levels_path, "level file")->required();
    sub->add_option("-o,--out", *fit_out, "report file (default: stdout)");
    sub->callback([=] {
      const auto tab = rotwave::read_levels(*fit_levels_path);
      const auto fit = rotwave::fit_polynomial(tab.levels);
      const auto prov = provenance("fit-levels", {{"levels", *fit_levels_path}});
      write_report(*fit_out, prov,
                   {{"a", format_double(fit.model.a)},
                    {"b", format_double(fit.model.b)},
                    {"rms", format_double(fit.rms)},
                    {"levels", std::to_string(fit.n_levels)},
                    {"unit", tab.unit}});
    });
  }

  // ---- replay ---------------------------------------------------------
  auto replay_amps = std::make_shared<std::string>();
  auto replay_in = std::make_shared<std::string>();
  auto replay_levels = std::make_shared<std::string>();
  auto replay_omega0 = std::make_shared<double>(1.0);
  auto replay_ts = std::make_shared<int>(129);
  auto replay_as = std::make_shared<int>(257);
  auto replay_tmax = std::make_shared<double>(1.0);
  auto replay_prefix = std::make_shared<std::string>();
  auto replay_images = std::make_shared<bool>(false);
  auto replay_imgfmt = std::make_shared<std::string>("pgm");
  auto replay_log = std::make_shared<bool>(false);
  {
    auto* sub = app.add_subcommand(
        "replay", "ring carpets of one packet under ideal and realistic spectra");
    sub->add_option("--amplitudes", *replay_amps, "amplitude file to ingest");
    sub->add_option("--in", *replay_in, "coefficient file (alternative to --amplitudes)");
    sub->add_option("--levels", *replay_levels, "level file for the realistic model")->required();
    sub->add_option("--omega0-ideal", *replay_omega0, "omega0 of the ideal rotor");
    sub->add_option("--t-samples", *replay_ts, "time samples");
    sub->add_option("--angle-samples", *replay_as, "theta samples");
    sub->add_option("--t-max", *replay_tmax, "end time, units of each model's T_rev");
    sub->add_option("--out-prefix", *replay_prefix, "prefix for output files")->required();
    sub->add_flag("--images", *replay_images, "also write heatmap images");
    sub->add_option("--image-format", *replay_imgfmt, "pgm | ppm")
        ->check(CLI::IsMember({"pgm", "ppm"}));
    sub->add_flag("--log-scale", *replay_log, "logarithmic intensity mapping");
    sub->callback([=, &global] {
      if (replay_amps->empty() == replay_in->empty())
        throw std::invalid_argument("replay: give exactly one of --amplitudes or --in");
      const auto wp = replay_amps->empty() ? rotwave::read_coefficients(*replay_in)
                                           : rotwave::ingest(*replay_amps);
      const rotwave::EnergyModel realistic = rotwave::read_levels(*replay_levels);
      rotwave::ReplaySpec rs;
      rs.angle_samples = *replay_as;
      rs.t_samples = *replay_ts;
      rs.t_end = *replay_tmax;
      rs.workers = global.workers;
      const auto result =
          rotwave::replay(wp, rotwave::RigidRotor{*replay_omega0}, realistic, rs);

      const std::vector<std::pair<std::string, std::string>> params{
          {"amplitudes", *replay_amps},
          {"in", *replay_in},
          {"levels", *replay_levels},
          {"omega0-ideal", format_double(*replay_omega0)},
          {"t-samples", std::to_string(*replay_ts)},
          {"angle-samples", std::to_string(*replay_as)},
          {"t-max", format_double(*replay_tmax)}};
      rotwave::EmitOptions opt;
      opt.log_scale = *replay_log;
      opt.extra_headers = provenance("replay", params);
      rotwave::emit(result.ideal, rotwave::ArtifactFormat::Csv, *replay_prefix + "-ideal.csv",
                    opt);
      rotwave::emit(result.realistic, rotwave::ArtifactFormat::Csv,
                    *replay_prefix + "-realistic.csv", opt);
      if (*replay_images) {
        const auto fmt = parse_image_format(*replay_imgfmt);
        const char* ext = *replay_imgfmt == "ppm" ? ".ppm" : ".pgm";
        rotwave::emit(result.ideal, fmt, *replay_prefix + "-ideal" + ext, opt);
        rotwave::emit(result.realistic, fmt, *replay_prefix + "-realistic" + ext, opt);
      }
      write_report(*replay_prefix + "-report.txt", opt.extra_headers,
                   {{"i-bar", format_double(result.i_bar_used)},
                    {"t-rev-ideal", format_double(result.ideal_scales.t_rev)},
                    {"t-cl-ideal", format_double(result.ideal_scales.t_cl)},
                    {"t-rev-realistic", format_double(result.realistic_scales.t_rev)},
                    {"t-cl-realistic", format_double(result.realistic_scales.t_cl)}});
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rotwave::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rotwave::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
