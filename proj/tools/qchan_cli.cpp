// Command-line harness: Monte-Carlo reproductions (fig1/fig2/fig3), the
// random-unitary set builders and span certificates, correctability and
// conversion checks on JSON inputs, the bit-flip recovery demo, and the
// universal-recovery condition report.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 malformed input.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qchan/experiment.hpp"
#include "qchan/json_io.hpp"
#include "qchan/recovery.hpp"
#include "qchan/ru_construct.hpp"
#include "qchan/state_ru.hpp"

using namespace qchan;

namespace {

struct CommonFlags {
  int n = 4;
  int samples = 1000;
  std::uint64_t seed = 12345;
  double tol = 1e-10;
  std::string out;
  std::string format = "json";
};

double default_tol() {
  if (const char* env = std::getenv("QCHAN_TOL")) {
    try {
      return std::stod(env);
    } catch (...) {
      throw MalformedInput("QCHAN_TOL is not a number");
    }
  }
  return 1e-10;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw MalformedInput("cannot open output file: " + out_path);
  file << text;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw MalformedInput("cannot open input file: " + path);
  try {
    return nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& err) {
    throw MalformedInput(path + ": " + err.what());
  }
}

int emit_record(const ExperimentRecord& record, const CommonFlags& flags) {
  emit(flags.format == "csv" ? record_to_csv(record) : record_to_json(record),
       flags.out);
  std::cerr << record.experiment << ": samples=" << record.samples
            << " max_bloch_dist_sq=" << jsonio::format_double(record.max_bloch_dist_sq)
            << " runtime_ms=" << record.runtime_ms << '\n';
  return record.max_bloch_dist_sq < flags.tol ? 0 : 1;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kraus-channel construction and verification harness"};
  app.require_subcommand(1);

  CommonFlags flags;
  flags.tol = default_tol();

  auto add_common = [&flags](CLI::App* cmd, bool with_n = true,
                             bool with_samples = true) {
    if (with_n) cmd->add_option("--n", flags.n, "Hilbert-space dimension");
    if (with_samples)
      cmd->add_option("--samples", flags.samples, "number of Monte-Carlo samples");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--tol", flags.tol, "pass/fail tolerance");
    cmd->add_option("--out", flags.out, "output file (stdout when omitted)");
    cmd->add_option("--format", flags.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* fig1 = app.add_subcommand(
      "fig1", "random depolarization channels, reference vs RU pipeline");
  add_common(fig1);

  CLI::App* fig2 = app.add_subcommand(
      "fig2", "phase-noise channel, direct vs converted Kraus set");
  add_common(fig2, /*with_n=*/false);

  CLI::App* fig3 = app.add_subcommand(
      "fig3", "state-dependent RU reconstruction of random state pairs");
  add_common(fig3);

  CLI::App* build_ru =
      app.add_subcommand("build-ru", "emit the RU Kraus set for dimension n");
  add_common(build_ru, true, false);

  CLI::App* check_hs = app.add_subcommand(
      "check-hs", "span certificate for the selected RU operator basis");
  add_common(check_hs, true, false);

  std::string kraus_path, projector_path, code_path, psi_path, rho_path;
  CLI::App* check_corr = app.add_subcommand(
      "check-correctability", "correctability conditions for a Kraus set JSON");
  check_corr->add_option("--kraus", kraus_path, "Kraus set JSON file")->required();
  check_corr->add_option("--projector", projector_path, "code projector JSON file")
      ->required();
  add_common(check_corr, false, false);

  CLI::App* convert_cmd = app.add_subcommand(
      "convert", "convert a Kraus set over the selected RU basis");
  convert_cmd->add_option("--kraus", kraus_path, "Kraus set JSON file")->required();
  add_common(convert_cmd, false, false);

  CLI::App* recover_demo = app.add_subcommand(
      "recover-demo", "bit-flip code end-to-end recovery demonstration");
  add_common(recover_demo, false, true);

  CLI::App* check_universal = app.add_subcommand(
      "check-universal", "universal-recovery conditions for a set and code");
  check_universal->add_option("--kraus", kraus_path, "Kraus set JSON file")
      ->required();
  check_universal->add_option("--code", code_path,
                              "code JSON file (defaults to the bit-flip code)");
  add_common(check_universal, false, false);

  CLI::App* state_ru = app.add_subcommand(
      "state-ru", "state-dependent RU decomposition of one (input, output) pair");
  state_ru->add_option("--psi", psi_path, "pure input JSON (column matrix)")
      ->required();
  state_ru->add_option("--rho-out", rho_path, "output density matrix JSON")
      ->required();
  add_common(state_ru, false, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fig1->parsed())
      return emit_record(run_fig1(flags.n, flags.samples, flags.seed), flags);
    if (fig2->parsed())
      return emit_record(run_fig2(flags.samples, flags.seed), flags);
    if (fig3->parsed())
      return emit_record(run_fig3(flags.n, flags.samples, flags.seed), flags);

    if (build_ru->parsed()) {
      const KrausSet set = ru_kraus_set(flags.n);
      const double residual = set.completeness_defect();
      std::ostringstream os;
      os << "{\"n\": " << flags.n
         << ", \"cardinality\": " << set.operators.size()
         << ", \"completeness_residual\": " << jsonio::format_double(residual)
         << ", \"kraus\": " << jsonio::kraus_to_json(set) << "}\n";
      emit(os.str(), flags.out);
      return residual < flags.tol ? 0 : 1;
    }

    if (check_hs->parsed()) {
      const HsBasis basis = hs_basis(flags.n);
      const Matrix t = transformation_matrix(flags.n);
      const bool ok = basis.gram_rank == flags.n * flags.n &&
                      basis.family_relation_residual < 1e-12;
      std::ostringstream os;
      os << "{\"n\": " << flags.n << ", \"gram_rank\": " << basis.gram_rank
         << ", \"expected_rank\": " << flags.n * flags.n
         << ", \"family_relation_residual\": "
         << jsonio::format_double(basis.family_relation_residual)
         << ", \"det_t\": " << jsonio::format_double(t.determinant().real())
         << ", \"pass\": " << bool_str(ok) << "}\n";
      emit(os.str(), flags.out);
      return ok ? 0 : 1;
    }

    if (check_corr->parsed()) {
      const KrausSet set = jsonio::parse_kraus(load_json(kraus_path));
      const Matrix projector = jsonio::parse_matrix(load_json(projector_path));
      const CorrectabilityReport report = check_correctability(set, projector);
      std::ostringstream os;
      os << "{\"satisfied\": " << bool_str(report.satisfied)
         << ", \"max_residual\": " << jsonio::format_double(report.max_residual)
         << ", \"hermiticity_defect\": "
         << jsonio::format_double(report.hermiticity_defect)
         << ", \"tolerance\": " << jsonio::format_double(report.tolerance)
         << ", \"alpha\": " << jsonio::matrix_to_json(report.alpha) << "}\n";
      emit(os.str(), flags.out);
      return report.satisfied ? 0 : 1;
    }

    if (convert_cmd->parsed()) {
      const KrausSet set = jsonio::parse_kraus(load_json(kraus_path));
      if (set.dim_in != set.dim_out)
        throw MalformedInput("convert: operators must be square");
      const HsBasis basis = hs_basis(set.dim_in);
      const ConversionResult conv = convert(set, basis.operators);
      const double process_gap =
          (process_matrix(conv.f_tilde) - process_matrix(set)).norm();
      std::ostringstream os;
      os << "{\"kept\": " << conv.kept << ", \"completeness_residual\": "
         << jsonio::format_double(conv.f_tilde.completeness_defect())
         << ", \"process_matrix_gap\": " << jsonio::format_double(process_gap)
         << ", \"coefficients\": " << jsonio::matrix_to_json(conv.coefficients)
         << ", \"h\": " << jsonio::matrix_to_json(conv.h)
         << ", \"f_tilde\": " << jsonio::kraus_to_json(conv.f_tilde) << "}\n";
      emit(os.str(), flags.out);
      return process_gap < 1e-9 ? 0 : 1;
    }

    if (recover_demo->parsed()) {
      const CodeSpec code = bitflip_code();
      const KrausSet base = bitflip_error_basis();
      double worst = 0.0;
      for (int i = 0; i < flags.samples; ++i) {
        const std::uint64_t s = derive_seed(flags.seed, i);
        SampleRng rng(derive_seed(s, 0));
        const Matrix big = polar_right(rng.ginibre(4, 4)).first;
        std::vector<Matrix> ops(4, Matrix::Zero(8, 8));
        for (int j = 0; j < 4; ++j)
          for (int c = 0; c < 4; ++c) ops[j] += big(j, c) * base.operators[c];
        const KrausSet noise = make_kraus(std::move(ops), "demo_noise");
        const DensityMatrix rho = random_density(2, derive_seed(s, 1));
        const DensityMatrix out = recover_end_to_end(rho, code, noise, base);
        worst = std::max(worst, bloch_distance_sq(out, rho));
      }
      const bool ok = worst < 1e-9;
      std::ostringstream os;
      os << "{\"code\": \"" << jsonio::escape(code.description)
         << "\", \"samples\": " << flags.samples
         << ", \"max_bloch_dist_sq\": " << jsonio::format_double(worst)
         << ", \"pass\": " << bool_str(ok) << "}\n";
      emit(os.str(), flags.out);
      return ok ? 0 : 1;
    }

    if (check_universal->parsed()) {
      const KrausSet set = jsonio::parse_kraus(load_json(kraus_path));
      const CodeSpec code = code_path.empty()
                                ? bitflip_code()
                                : jsonio::parse_code(load_json(code_path));
      const UniversalConditionsReport report =
          check_universal_conditions(set, code);
      const bool all = report.hs_complete && report.correctable &&
                       report.code_stabilized;
      std::ostringstream os;
      os << "{\"hs_complete\": " << bool_str(report.hs_complete)
         << ", \"gram_rank\": " << report.gram_rank
         << ", \"required_rank\": " << report.required_rank
         << ", \"correctable\": " << bool_str(report.correctable)
         << ", \"correctability_residual\": "
         << jsonio::format_double(report.correctability_residual)
         << ", \"eps_alpha_unitarity_defect\": "
         << jsonio::format_double(report.eps_alpha_unitarity_defect)
         << ", \"code_stabilized\": " << bool_str(report.code_stabilized)
         << ", \"stabilization_residual\": "
         << jsonio::format_double(report.stabilization_residual)
         << ", \"ancilla_size_sufficient\": "
         << bool_str(report.ancilla_size_sufficient)
         << ", \"completeness_defect\": "
         << jsonio::format_double(report.completeness_defect)
         << ", \"pass\": " << bool_str(all) << "}\n";
      emit(os.str(), flags.out);
      return all ? 0 : 1;
    }

    if (state_ru->parsed()) {
      const Matrix psi_col = jsonio::parse_matrix(load_json(psi_path));
      if (psi_col.cols() != 1)
        throw MalformedInput("state-ru: --psi must be a column matrix");
      Vector amplitudes = psi_col.col(0);
      const double norm = amplitudes.norm();
      if (std::abs(norm - 1.0) > 1e-8)
        throw MalformedInput("state-ru: input state is not normalized");
      amplitudes /= norm;
      const PureState psi(amplitudes);
      const DensityMatrix rho_out =
          DensityMatrix(jsonio::parse_matrix(load_json(rho_path)));
      const StateRuDecomposition d = decompose(psi, rho_out);
      const double residual =
          bloch_distance_sq(reconstruct_output(d, psi), rho_out);
      std::ostringstream os;
      os << "{\"rank\": " << d.weights.size() << ", \"weights\": [";
      for (Eigen::Index j = 0; j < d.weights.size(); ++j)
        os << (j ? ", " : "") << jsonio::format_double(d.weights(j));
      os << "], \"reconstruction_bloch_dist_sq\": "
         << jsonio::format_double(residual)
         << ", \"kraus\": " << jsonio::kraus_to_json(d.kraus) << "}\n";
      emit(os.str(), flags.out);
      return residual < flags.tol ? 0 : 1;
    }
  } catch (const MalformedInput& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return 2;
  } catch (const DimensionMismatch& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return 2;
  } catch (const NotAProjector& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 2;
}
