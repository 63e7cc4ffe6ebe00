// SPDX-License-Identifier: Apache-2.0
//
// seek: command-line front end for the source-seeking simulator.
//   run         one episode -> trajectory CSV
//   montecarlo  episode batch -> histogram CSV + summary JSON
//   converge    analytic error recursion -> CSV

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dopseek/harness.hpp"
#include "dopseek/io.hpp"

namespace fs = std::filesystem;
using namespace dopseek;

namespace {

struct Overrides {
    std::optional<std::string> config;
    // scenario
    std::optional<double> d_init, R, R_in, f_c, v, c, sigma_n2_db, snr_init_db, d_v, T_slot, T_s;
    std::optional<int> L, N, N_fft;
    std::optional<double> sigma_phi_deg, cfo_drift, cfo_init_range, sigma_omega_abstract,
        max_turn_rate_deg_s;
    // seeker
    std::optional<double> delta_deg, R_c;
    std::optional<int> M, smoothing_len;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "flat key=value configuration file");
    cmd->add_option("--d-init", o.d_init, "initial source-UAV range d, m")
        ->capture_default_str()
        ->default_val(5000.0);
    cmd->add_option("--R", o.R, "scatterer annulus outer radius R, m")->default_val(200.0);
    cmd->add_option("--R-in", o.R_in, "scatterer annulus inner radius R_in, m")
        ->default_val(100.0);
    cmd->add_option("--L", o.L, "number of scatterers L")->default_val(20);
    cmd->add_option("--f-c", o.f_c, "carrier frequency f_c, Hz")->default_val(2.0e9);
    cmd->add_option("--v", o.v, "UAV speed v, m/s")->default_val(10.0);
    cmd->add_option("--c", o.c, "propagation speed c, m/s")->default_val(2.998e8);
    cmd->add_option("--sigma-n2-db", o.sigma_n2_db, "receiver noise power sigma_n^2, dB")
        ->default_val(-70.0);
    cmd->add_option("--snr-init-db", o.snr_init_db, "average received SNR at d_init, dB")
        ->default_val(0.0);
    cmd->add_option("--d-v", o.d_v, "success radius d_v, m")->default_val(200.0);
    cmd->add_option("--t-slot", o.T_slot, "beacon repetition period T_slot, s")
        ->default_val(0.05);
    cmd->add_option("--t-s", o.T_s, "sample period T_s, s")->default_val(1e-5);
    cmd->add_option("--n", o.N, "samples per beacon capture N (capture length T = N*T_s)")
        ->default_val(1000);
    cmd->add_option("--n-fft", o.N_fft, "DFT length N_FFT")->default_val(4096);
    cmd->add_option("--sigma-phi", o.sigma_phi_deg, "bearing sensor noise std, degrees")
        ->default_val(1.0);
    cmd->add_option("--cfo-drift", o.cfo_drift, "CFO random-walk intensity, Hz/sqrt(s)")
        ->default_val(1.0);
    cmd->add_option("--cfo-init-range", o.cfo_init_range, "initial CFO uniform bound, Hz")
        ->default_val(1000.0);
    cmd->add_option("--sigma-omega-abstract", o.sigma_omega_abstract,
                    "frequency noise std for the abstract backend, rad/s")
        ->default_val(kTwoPi);
    cmd->add_option("--max-turn-rate", o.max_turn_rate_deg_s,
                    "heading slew limit, deg/s (0 = unlimited)")
        ->default_val(0.0);
    cmd->add_option("--delta", o.delta_deg, "bearing perturbation delta, degrees")
        ->default_val(10.0);
    cmd->add_option("--M", o.M, "slots per half-leg M")->default_val(20);
    cmd->add_option("--smoothing-len", o.smoothing_len, "moving-average window, slots")
        ->default_val(15);
    cmd->add_option("--R-c", o.R_c, "initial-scan circle radius R_c, m")->default_val(50.0);
}

/// defaults -> config file -> explicitly passed flags, then derived fields.
void build_configs(const CLI::App* cmd, const Overrides& o, Scenario& sc, SeekerConfig& cfg) {
    sc = Scenario{};
    cfg = SeekerConfig{};
    if (o.config) load_config_file(*o.config, sc, cfg);

    auto given = [cmd](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--d-init")) sc.d_init = *o.d_init;
    if (given("--R")) sc.R = *o.R;
    if (given("--R-in")) sc.R_in = *o.R_in;
    if (given("--L")) sc.L = *o.L;
    if (given("--f-c")) sc.f_c = *o.f_c;
    if (given("--v")) sc.v = *o.v;
    if (given("--c")) sc.c = *o.c;
    if (given("--sigma-n2-db")) sc.sigma_n2_db = *o.sigma_n2_db;
    if (given("--snr-init-db")) sc.snr_init_db = *o.snr_init_db;
    if (given("--d-v")) sc.d_v = *o.d_v;
    if (given("--t-slot")) sc.T_slot = *o.T_slot;
    if (given("--t-s")) sc.T_s = *o.T_s;
    if (given("--n")) sc.N = *o.N;
    if (given("--n-fft")) sc.N_fft = *o.N_fft;
    if (given("--sigma-phi")) sc.sigma_phi = deg2rad(*o.sigma_phi_deg);
    if (given("--cfo-drift")) sc.cfo_drift_rate_std = *o.cfo_drift;
    if (given("--cfo-init-range")) sc.cfo_init_range = *o.cfo_init_range;
    if (given("--sigma-omega-abstract")) sc.sigma_omega_abstract = *o.sigma_omega_abstract;
    if (given("--max-turn-rate")) sc.max_turn_rate = deg2rad(*o.max_turn_rate_deg_s);
    if (given("--delta")) cfg.delta = deg2rad(*o.delta_deg);
    if (given("--M")) cfg.M = *o.M;
    if (given("--smoothing-len")) cfg.smoothing_len = *o.smoothing_len;
    if (given("--R-c")) cfg.R_c = *o.R_c;

    sync_seeker_constants(sc, cfg);
    sc.validate();
    cfg.validate();
}

Backend parse_backend(const std::string& name) {
    if (name == "full") return Backend::Full;
    if (name == "abstract") return Backend::Abstract;
    throw std::invalid_argument("--backend must be 'full' or 'abstract'");
}

/// Debug dump: one capture synthesized at the episode's initial pose.
void dump_initial_capture(const Scenario& scenario, std::uint64_t seed, const fs::path& path) {
    Scenario sc = scenario;
    sc.scatterers =
        place_scatterers(derive_seed(seed, 0, Stream::Scatterers), sc.L, sc.R_in, sc.R);
    ensure_calibrated(sc);
    Rng init_rng(derive_seed(seed, 0, Stream::Init));
    Rng cfo_rng(derive_seed(seed, 0, Stream::Cfo));
    Rng noise_rng(derive_seed(seed, 0, Stream::CaptureNoise));
    const double pos_angle = init_rng.angle();
    UavState uav{{sc.d_init * std::cos(pos_angle), sc.d_init * std::sin(pos_angle)}, 0.0, sc.v,
                 0.0};
    uav.heading = init_rng.angle();
    const CfoProcess cfo = init_cfo(sc, cfo_rng);
    const BeaconCapture cap = synthesize_beacon(build_paths(sc, uav), cfo, sc, noise_rng, 0);
    write_file_atomic(path, capture_csv(cap));
}

int run_main(const CLI::App* cmd, const Overrides& o, std::uint64_t seed,
             const std::string& backend_name, bool no_stage1,
             const std::optional<double>& theta0_err_deg, double max_t_factor,
             const std::string& out_dir, const std::optional<std::string>& dump_capture) {
    Scenario sc;
    SeekerConfig cfg;
    build_configs(cmd, o, sc, cfg);

    EpisodeOptions opt;
    opt.backend = parse_backend(backend_name);
    opt.seed = seed;
    opt.with_stage1 = !no_stage1;
    opt.max_t_factor = max_t_factor;
    if (theta0_err_deg) opt.init_theta_err = deg2rad(*theta0_err_deg);

    fs::create_directories(out_dir);
    if (dump_capture) dump_initial_capture(sc, seed, *dump_capture);

    const EpisodeLog log = run_episode(sc, cfg, opt);
    const fs::path out = fs::path(out_dir) / "trajectory.csv";
    write_file_atomic(out, trajectory_csv(log));

    std::cout << "seed=" << seed << " backend=" << backend_name
              << " stage1=" << (opt.with_stage1 ? "on" : "off")
              << " outcome=" << (log.success ? "success" : "timeout") << " slots=" << log.slots
              << " distance_m=" << fmt_double(log.distance_traveled)
              << " ratio=" << fmt_double(log.distance_traveled / log.shortest_path)
              << " final_range_m=" << fmt_double(log.final_range) << " trajectory=" << out.string()
              << "\n";
    return 0;
}

int montecarlo_main(const CLI::App* cmd, const Overrides& o, std::uint64_t seed, int runs,
                    const std::string& backend_name, bool no_stage1, int threads,
                    double bin_width, const std::string& out_dir) {
    Scenario sc;
    SeekerConfig cfg;
    build_configs(cmd, o, sc, cfg);

    const McSummary s = monte_carlo(sc, cfg, parse_backend(backend_name), runs, seed,
                                    !no_stage1, threads, bin_width);
    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "histogram.csv", histogram_csv(s));
    const std::string json = summary_json(s).dump(2) + "\n";
    write_file_atomic(fs::path(out_dir) / "summary.json", json);
    std::cout << json;
    return 0;
}

int converge_main(const CLI::App* cmd, const Overrides& o, double theta0_deg, int k_max,
                  const std::string& out_dir) {
    Scenario sc;
    SeekerConfig cfg;
    build_configs(cmd, o, sc, cfg);

    const auto trace = convergence_trace(deg2rad(theta0_deg), cfg.delta, k_max);
    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "convergence.csv", convergence_csv(trace));
    std::cout << "steps=" << k_max << " theta0_deg=" << fmt_double(theta0_deg)
              << " final_err_deg=" << fmt_double(rad2deg(trace.back())) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seek: RF source-seeking simulator driven by Doppler frequency measurements"};
    app.require_subcommand(1);

    Overrides o_run, o_mc, o_conv;
    std::uint64_t seed = 0;
    std::uint64_t mc_seed = 0;
    std::string backend = "full";
    std::string mc_backend = "full";
    bool no_stage1 = false;
    bool mc_no_stage1 = false;
    std::optional<double> theta0_err_deg;
    double max_t_factor = 4.0;
    std::string out_dir = ".";
    std::string mc_out_dir = ".";
    std::string conv_out_dir = ".";
    std::optional<std::string> dump_capture;
    int runs = 100;
    int threads = 0;
    double bin_width = 250.0;
    double theta0_deg = 60.0;
    int k_max = 200;

    CLI::App* run = app.add_subcommand("run", "simulate one episode and write the trajectory CSV");
    run->footer(
        "Writes <out>/trajectory.csv with one row per slot:\n"
        "  t          elapsed time, s\n"
        "  x,y        UAV position, m\n"
        "  d          range to the source, m\n"
        "  phi        heading flown during the slot, rad\n"
        "  theta_k    current direction estimate, rad (nan during the scan)\n"
        "  theta_star true bearing to the source, rad\n"
        "  omega_tilde raw frequency measurement, rad/s\n"
        "  accepted   1 if the measurement passed the outlier gate\n"
        "  rss        received signal strength at the slot position\n"
        "--dump-capture writes index,real,imag rows of one baseband capture.");
    add_common_options(run, o_run);
    run->add_option("--seed", seed, "episode seed")->envname("SEEK_SEED")->default_val(0);
    run->add_option("--backend", backend, "measurement backend: full | abstract")
        ->check(CLI::IsMember({"full", "abstract"}))
        ->default_val("full");
    run->add_flag("--no-stage1", no_stage1, "skip the circular scan; start with a random direction");
    run->add_option("--theta0-err", theta0_err_deg,
                    "fixed initial direction error, degrees (disables the circular scan)");
    run->add_option("--max-t-factor", max_t_factor,
                    "timeout as a multiple of the straight-line time")
        ->default_val(4.0);
    run->add_option("--out", out_dir, "output directory")->default_val(".");
    run->add_option("--dump-capture", dump_capture,
                    "also write one baseband capture at the initial pose to this CSV file");

    CLI::App* mc = app.add_subcommand("montecarlo", "run an episode batch and write histogram + summary");
    mc->footer(
        "Writes <out>/histogram.csv (bin_low,bin_high,count over successful-episode\n"
        "travel distances, m) and <out>/summary.json (runs, successes, success_rate,\n"
        "mean/median/std distance, mean_ratio to the shortest path, histogram).");
    add_common_options(mc, o_mc);
    mc->add_option("--runs", runs, "number of independent episodes")->default_val(100);
    mc->add_option("--seed", mc_seed, "master seed")->envname("SEEK_SEED")->default_val(0);
    mc->add_option("--backend", mc_backend, "measurement backend: full | abstract")
        ->check(CLI::IsMember({"full", "abstract"}))
        ->default_val("full");
    mc->add_flag("--no-stage1", mc_no_stage1, "skip the circular scan in every episode");
    mc->add_option("--threads", threads, "worker threads (0 = hardware)")->default_val(0);
    mc->add_option("--bin-width", bin_width, "histogram bin width, m")->default_val(250.0);
    mc->add_option("--out", mc_out_dir, "output directory")->default_val(".");

    CLI::App* conv = app.add_subcommand("converge", "iterate the analytic error recursion");
    conv->footer("Writes <out>/convergence.csv with k,theta_err rows (radians).");
    add_common_options(conv, o_conv);
    conv->add_option("--theta0", theta0_deg, "initial direction error, degrees")
        ->default_val(60.0);
    conv->add_option("--k-max", k_max, "number of iterations")->default_val(200);
    conv->add_option("--out", conv_out_dir, "output directory")->default_val(".");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_main(run, o_run, seed, backend, no_stage1, theta0_err_deg, max_t_factor,
                            out_dir, dump_capture);
        if (mc->parsed())
            return montecarlo_main(mc, o_mc, mc_seed, runs, mc_backend, mc_no_stage1, threads,
                                   bin_width, mc_out_dir);
        if (conv->parsed()) return converge_main(conv, o_conv, theta0_deg, k_max, conv_out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
