#include "ffsing/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ffsing/acceptance.hpp"
#include "ffsing/error.hpp"
#include "ffsing/sampling.hpp"
#include "ffsing/textio.hpp"

namespace ffsing::cli {

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::optional<int> order;
  double tol = kDefaultTol;
  int samples = 11;
};

// Shared flags; subcommands fall through to them. Returns the --tol option.
CLI::Option* add_common(CLI::App& app, Common& c) {
  app.add_option("--seed", c.seed, "seed for randomized steps")->capture_default_str();
  app.add_option("--order", c.order, "truncate or zero-extend input jets to this order")
      ->check(CLI::Range(0, kMaxOrder));
  app.add_option("--samples", c.samples, "sample count for profiles")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  return app.add_option("--tol", c.tol, "numeric tolerance (default 1e-9 or $FFSING_TOL)");
}

DiffeoJet load_jet(const std::string& path, const Common& c) {
  Jet2 jet = parse_jet(read_file(path));
  if (c.order) jet = jet.resized(*c.order);
  return DiffeoJet(std::move(jet), c.tol);
}

GluingTuple load_tuple(const std::string& path, const Common& c) {
  GluingTuple tuple = parse_gluing_tuple(read_file(path));
  if (!c.order) return tuple;
  std::vector<DiffeoJet> maps;
  for (const auto& m : tuple.maps()) maps.emplace_back(m.jet().resized(*c.order));
  return GluingTuple(std::move(maps));
}

// First whitespace-delimited token outside comments.
std::string first_keyword(const std::string& text) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::istringstream words(line.substr(0, line.find('#')));
    if (std::string w; words >> w) return w;
  }
  return {};
}

// A single gluing map, given either as a jet file or as an n = 2 tuple file.
DiffeoJet load_single_map(const std::string& path, const Common& c) {
  if (first_keyword(read_file(path)) == "n") {
    const GluingTuple tuple = load_tuple(path, c);
    if (tuple.points() != 2) throw Error("SIZE_MISMATCH", "expected a tuple with n = 2");
    return tuple.maps().front();
  }
  return load_jet(path, c);
}

Profile load_profile_or_family(const std::string& path, int samples, ProfileRoute route) {
  const std::string text = read_file(path);
  if (first_keyword(text) == "family") {
    return mu_profile(parse_family(text), samples, route);
  }
  return parse_profile(text);
}

std::string format_matrix_row(const Eigen::Matrix2d& m) {
  return fmt::format("{}\t{}\t{}\t{}", format_double(m(0, 0)), format_double(m(0, 1)),
                     format_double(m(1, 0)), format_double(m(1, 1)));
}

double tolerance_from_env() {
  const char* env = std::getenv(kTolEnv);
  if (env == nullptr || *env == '\0') return kDefaultTol;
  const double tol = parse_double(env);
  if (!(tol > 0.0)) throw ParseError(fmt::format("{} must be positive", kTolEnv));
  return tol;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Common c;
  std::function<void()> action;
  CLI::App app{"Invariants of focus-focus singularities from jets and Hessians", "ffsing"};
  app.require_subcommand(1);
  app.fallthrough();
  const CLI::Option* tol_flag = add_common(app, c);

  const auto group = [&](const char* name, const char* help) {
    CLI::App* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  };
  const auto command = [&](CLI::App* g, const char* name, const char* help) {
    CLI::App* cmd = g->add_subcommand(name, help);
    cmd->fallthrough();
    return cmd;
  };

  // jet
  std::string file_a;
  std::string file_b;
  std::optional<double> scale;
  CLI::App* jet = group("jet", "jet algebra");
  CLI::App* jet_compose = command(jet, "compose", "print F(G, conj G)");
  jet_compose->add_option("F", file_a)->required();
  jet_compose->add_option("G", file_b)->required();
  jet_compose->callback([&] {
    action = [&] {
      out << format_jet(compose(load_jet(file_a, c).jet(), load_jet(file_b, c).jet()));
    };
  });
  CLI::App* jet_invert = command(jet, "invert", "print the compositional inverse");
  jet_invert->add_option("F", file_a)->required();
  jet_invert->callback([&] { action = [&] { out << format_jet(load_jet(file_a, c).inverse().jet()); }; });
  CLI::App* jet_conj = command(jet, "conj", "print conj F, or c z ∘ F ∘ (z / c) with --scale");
  jet_conj->add_option("F", file_a)->required();
  jet_conj->add_option("--scale", scale, "scaling factor c > 0");
  jet_conj->callback([&] {
    action = [&] {
      const DiffeoJet f = load_jet(file_a, c);
      out << format_jet(scale ? conj_by_scaling(f, *scale).jet() : f.jet().conj());
    };
  });

  // germ
  CLI::App* germ = group("germ", "liftability of jets");
  CLI::App* germ_liftable = command(germ, "liftable", "print the liftability class");
  germ_liftable->add_option("F", file_a)->required();
  germ_liftable->callback([&] {
    action = [&] { out << to_string(classify_liftable(load_jet(file_a, c), c.tol).kind) << '\n'; };
  });
  CLI::App* germ_lift = command(germ, "lift", "print the lift to the local model");
  germ_lift->add_option("F", file_a)->required();
  germ_lift->callback([&] {
    action = [&] {
      const DiffeoJet f = load_jet(file_a, c);
      const LiftPair lift = lift_to_model(f, c.tol);
      out << fmt::format("# residual {}\n", format_double(verify_lift(f, lift))) << format_lift(lift);
    };
  });

  // orbit
  int points = 0;
  CLI::App* orbit = group("orbit", "gauge action on gluing tuples");
  CLI::App* orbit_act = command(orbit, "act", "apply a gauge tuple to a gluing tuple");
  orbit_act->add_option("GAUGE", file_a)->required();
  orbit_act->add_option("TUPLE", file_b)->required();
  orbit_act->callback([&] {
    action = [&] {
      const GaugeTuple eta = parse_gauge_tuple(read_file(file_a));
      out << format_gluing_tuple(gauge_act(eta, load_tuple(file_b, c)));
    };
  });
  CLI::App* orbit_inv = command(orbit, "invariants", "first-order invariants and their canonical form");
  orbit_inv->add_option("TUPLE", file_a)->required();
  orbit_inv->callback([&] {
    action = [&] {
      const FirstOrderInvariant raw = first_order_invariants(load_tuple(file_a, c));
      const FirstOrderInvariant canon = canonicalize_invariant(raw, c.tol);
      out << "# mu_i = b_i / conj(a_i) for the linear part a_i z + b_i zbar of the i-th gluing map\n";
      out << "# canonical: first nonzero entry rotated to the positive axis, then the smaller of the "
             "tuple and its conjugate\n";
      out << "# i\tmu_re\tmu_im\tcanonical_re\tcanonical_im\n";
      for (std::size_t i = 0; i < raw.mu.size(); ++i) {
        out << fmt::format("{}\t{}\t{}\t{}\t{}\n", i + 2, format_real(raw.mu[i].real()),
                           format_real(raw.mu[i].imag()), format_real(canon.mu[i].real()),
                           format_real(canon.mu[i].imag()));
      }
    };
  });
  CLI::App* orbit_norm = command(orbit, "normalize", "gauge pair taking a map to z + mu zbar");
  orbit_norm->add_option("MAP", file_a, "jet file or n = 2 tuple file")->required();
  orbit_norm->callback([&] {
    action = [&] {
      const DoublePinchedNormalization n = normalize_double_pinched(load_single_map(file_a, c));
      out << fmt::format("# mu {}\n# residual {}\n", format_double(n.mu), format_double(n.residual));
      out << format_gauge_tuple(GaugeTuple({n.psi1, n.psi2}));
    };
  });
  CLI::App* orbit_equiv = command(orbit, "equiv", "compare two double-pinched gluing maps");
  orbit_equiv->add_option("MAP", file_a)->required();
  orbit_equiv->add_option("OTHER", file_b)->required();
  orbit_equiv->callback([&] {
    action = [&] {
      const EquivalenceResult r =
          equivalent_double_pinched(load_single_map(file_a, c), load_single_map(file_b, c), c.tol);
      out << to_string(r.verdict) << '\n';
      out << fmt::format("# mu {} mu_other {}\n", format_double(r.mu), format_double(r.mu_other));
      if (r.witness) {
        out << fmt::format("# residual {}\n", format_double(r.residual));
        out << "# OTHER = first ∘ MAP ∘ second^-1\n";
        out << format_gauge_tuple(GaugeTuple({r.witness->first, r.witness->second}));
      }
    };
  });
  CLI::App* orbit_rank = command(orbit, "rank", "orbit, stabilizer and codimension by numerical rank");
  orbit_rank->add_option("TUPLE", file_a, "tuple file; omit to tabulate generic linear tuples");
  orbit_rank->add_option("--points", points, "n for the table mode")->check(CLI::Range(2, 16));
  orbit_rank->callback([&] {
    action = [&] {
      const auto row = [&](int k, const OrbitRank& r) {
        return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", k, r.orbit_dim, r.stab_dim, r.codim, r.group_dim,
                           r.ambient_dim, format_double(r.gap));
      };
      const char* header = "# k\torbit_dim\tstab_dim\tcodim\tgroup_dim\tambient_dim\tgap\n";
      if (!file_a.empty()) {
        const GluingTuple tuple = load_tuple(file_a, c);
        out << header << row(tuple.order(), orbit_tangent_rank(tuple));
        return;
      }
      if (points == 0) throw Error("USAGE", "orbit rank needs TUPLE or --points");
      Sampler s(c.seed);
      out << fmt::format("# generic linear tuples, n = {}, seed {}\n", points, c.seed) << header;
      for (int k = 1; k <= c.order.value_or(kDefaultOrder); ++k) {
        out << row(k, orbit_tangent_rank(s.linear_tuple(points, k)));
      }
    };
  });

  // geom
  std::string lambda1;
  std::string lambda_i;
  CLI::App* geom = group("geom", "complex structures and eigenvalue invariants");
  CLI::App* geom_trace = command(geom, "trace", "trace invariant of a gluing map against J_st");
  geom_trace->add_option("MAP", file_a, "jet file or n = 2 tuple file")->required();
  geom_trace->callback([&] {
    action = [&] {
      const double tr =
          trace_invariant(ComplexStructure2::standard(), j_from_gluing(load_single_map(file_a, c)));
      out << "# trace = tr(J2 J1^-1) with J1 = J_st and J2 pushed forward by the linear part\n";
      out << "# trace\tmu\n" << fmt::format("{}\t{}\n", format_double(tr), format_double(mu_from_trace(tr)));
    };
  });
  CLI::App* geom_hj = command(geom, "hessian-j", "complex structure of a focus-focus Hessian pair");
  geom_hj->add_option("HESSIAN", file_a)->required();
  geom_hj->callback([&] {
    action = [&] {
      HessianToJOptions opts;
      opts.seed = c.seed;
      const StructurePair p = hessian_to_j(parse_hessian(read_file(file_a)), opts);
      out << "# sign\tj11\tj12\tj21\tj22\n";
      out << "+\t" << format_matrix_row(p.plus.matrix()) << '\n';
      out << "-\t" << format_matrix_row(p.minus.matrix()) << '\n';
    };
  });
  CLI::App* geom_mu = command(geom, "eigen-mu", "mu from two eigenvalues, e.g. 1+2i");
  geom_mu->add_option("LAMBDA1", lambda1)->required();
  geom_mu->add_option("LAMBDA_I", lambda_i)->required();
  geom_mu->callback([&] {
    action = [&] {
      const Complex mu = eigen_mu(parse_complex(lambda1), parse_complex(lambda_i));
      out << "# mu = (lambda_i - lambda_1) / (lambda_i + conj lambda_1)\n# mu\tabs\n";
      out << fmt::format("{}\t{}\n", format_complex(mu), format_real(std::abs(mu)));
    };
  });

  // lab
  ProfileRoute route = ProfileRoute::Slice4;
  double numeric_tol = 1e-6;
  const std::map<std::string, ProfileRoute> routes{{"slice4", ProfileRoute::Slice4},
                                                   {"suspended5", ProfileRoute::Suspended5}};
  CLI::App* lab = group("lab", "rank-1 families of focus-focus points");
  CLI::App* lab_profile = command(lab, "profile", "mu along the critical curve");
  lab_profile->add_option("FAMILY", file_a)->required();
  lab_profile->add_option("--route", route, "slice4 or suspended5")
      ->transform(CLI::CheckedTransformer(routes));
  lab_profile->callback([&] {
    action = [&] { out << format_profile(mu_profile(parse_family(read_file(file_a)), c.samples, route), route); };
  });
  CLI::App* lab_obs = command(lab, "obstruction", "product-structure test on a profile");
  lab_obs->add_option("INPUT", file_a, "family file or profile TSV")->required();
  lab_obs->add_option("--route", route, "slice4 or suspended5")->transform(CLI::CheckedTransformer(routes));
  lab_obs->add_option("--numeric-tol", numeric_tol, "per-sample accuracy of mu")->capture_default_str();
  lab_obs->callback([&] {
    action = [&] {
      const ObstructionReport r =
          product_obstruction_report(load_profile_or_family(file_a, c.samples, route), numeric_tol);
      out << "# verdict\tspread\tthreshold\tt_low\tmu_low\tt_high\tmu_high\tvalid_samples\n";
      out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", to_string(r.verdict), format_double(r.spread),
                         format_double(r.threshold), format_double(r.low.first), format_double(r.low.second),
                         format_double(r.high.first), format_double(r.high.second), r.valid_samples);
    };
  });

  // selftest
  int criterion = 0;
  int status = kExitOk;
  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->fallthrough();
  selftest->add_option("--criterion", criterion, "run one criterion (1-9)")->check(CLI::Range(1, 9));
  selftest->callback([&] {
    action = [&] {
      const auto results = criterion == 0 ? run_acceptance(c.seed)
                                          : std::vector<CriterionResult>{run_criterion(criterion, c.seed)};
      print_results(results, out);
      const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
      status = all ? kExitOk : kExitSelftestFailed;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (tol_flag->count() == 0) c.tol = tolerance_from_env();
    if (!(c.tol > 0.0)) throw ParseError("--tol must be positive");
    action();
    return status;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ERR USAGE: " << e.what() << '\n';
    return kExitParse;
  } catch (const ParseError& e) {
    err << "ERR " << e.code() << ": " << e.what() << '\n';
    return kExitParse;
  } catch (const IoError& e) {
    err << "ERR " << e.code() << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "ERR " << e.code() << ": " << e.what() << '\n';
    return kExitContract;
  }
}

}  // namespace ffsing::cli
