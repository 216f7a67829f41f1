#include "cli.hpp"

#include "discretediag/diagnose.hpp"
#include "discretediag/error.hpp"
#include "discretediag/io.hpp"
#include "discretediag/sim_study.hpp"
#include "discretediag/simulate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace discretediag::cli
{

namespace
{

const std::vector<std::string> kMethodNames{"hangartner", "weiss", "darboot", "mcboot", "billingsley", "billingsleyboot"};

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

std::vector<Method> parse_methods(const std::vector<std::string>& names)
{
    std::vector<Method> methods;
    for (const auto& name : names)
        methods.push_back(*parse_method(name));
    return methods;
}

// "0.9,0.1;0.1,0.9" -> rows
std::vector<std::vector<double>> parse_matrix(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::stringstream rows_in(text);
    std::string row;
    while (std::getline(rows_in, row, ';'))
    {
        std::vector<double> values;
        std::stringstream cells(row);
        std::string cell;
        while (std::getline(cells, cell, ','))
        {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(cell, &used);
            }
            catch (const std::exception&)
            {
                used = 0;
            }
            if (used == 0 || used != cell.size())
                throw UsageError("invalid matrix entry '" + cell + "'");
            values.push_back(v);
        }
        rows.push_back(std::move(values));
    }
    return rows;
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <class Writer>
void with_output(const std::string& path, std::ostream& out, Writer&& write)
{
    if (path.empty() || path == "-")
    {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw DataError("cannot open " + path + " for writing");
    write(file);
    if (!file)
        throw DataError("failed writing " + path);
}

struct DiagnoseArgs
{
    std::string input;
    std::string format = "long";
    bool no_header = false;
    std::string method;
    std::string family = "frequency";
    std::string mode = "between";
    double window_fraction = kDefaultWindowFraction;
    std::size_t sequential = 0;
    std::vector<std::size_t> checkpoints;
    double alpha = 0.05;
    std::size_t boot_b = 1000;
    std::uint64_t seed = 0;
    std::string null_model = "pooled";
    unsigned threads = 1;
    std::string output;
    std::string report_format = "csv";
};

void run_diagnose(const DiagnoseArgs& a, std::ostream& out)
{
    const auto chains = read_chain_csv(a.input, CsvOptions{*parse_chain_format(a.format), !a.no_header});

    DiagnosticRequest req;
    if (!a.method.empty())
        req.method = *parse_method(a.method);
    else
        req.method = a.family == "transition" ? Method::Billingsley : Method::Weiss;
    req.mode = *parse_mode(a.mode);
    req.window_fraction = a.window_fraction;
    req.alpha = a.alpha;
    req.bootstrap = BootstrapConfig{a.boot_b, a.seed, a.threads, *parse_null_model(a.null_model)};

    const bool sequential = a.sequential > 0 || !a.checkpoints.empty();
    if (sequential && req.mode == Mode::Within)
        throw UsageError("--sequential and --checkpoints apply to between mode only");
    if (a.sequential > 0)
        req.checkpoint_count = a.sequential;
    req.checkpoints = a.checkpoints;

    DiagnosticReport report;
    if (sequential)
        report = run_sequential(chains, req);
    else if (req.mode == Mode::Between)
        report = run_between(chains, req);
    else
        report = run_within(chains, req);

    with_output(a.output, out, [&](std::ostream& o) { write_report(report, o, *parse_report_format(a.report_format)); });
}

struct SimulateArgs
{
    std::string model = "dar1";
    std::vector<double> p;
    double phi = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    std::string transition;
    std::vector<double> initial;
    std::size_t length = 1000;
    std::size_t chains = 1;
    std::uint64_t seed = 0;
    std::string output;
};

void run_simulate(const SimulateArgs& a, std::ostream& out)
{
    if (a.chains == 0)
        throw UsageError("--chains must be at least 1");
    if (a.length < 2)
        throw UsageError("--length must be at least 2");
    std::size_t categories = a.p.size();
    MarkovParams markov;
    if (a.model == "markov")
    {
        if (a.transition.empty())
            throw UsageError("--model markov requires --transition");
        markov.transition = parse_matrix(a.transition);
        categories = markov.transition.size();
        markov.initial = a.initial.empty() ? std::vector<double>(categories, 1.0 / static_cast<double>(categories))
                                           : a.initial;
        markov.validate();
    }
    else if (a.p.empty())
    {
        throw UsageError("--model " + a.model + " requires --p");
    }

    std::vector<Sequence> segments;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < a.chains; ++c)
    {
        auto rng = derive_stream(a.seed, c);
        if (a.model == "dar1")
            segments.push_back(simulate_dar1(Dar1Params{a.p, a.phi}, a.length, rng));
        else if (a.model == "ndarma")
            segments.push_back(simulate_ndarma(NdarmaParams{a.p, a.ar, a.ma.empty() ? std::vector<double>{1.0} : a.ma},
                                               a.length, rng));
        else
            segments.push_back(simulate_markov(markov, a.length, rng));
        names.push_back("chain" + std::to_string(c + 1));
    }
    const SegmentSet set(CategoryAlphabet::indexed(categories), std::move(segments), std::move(names));
    with_output(a.output, out, [&](std::ostream& o) { write_chains_wide(set, o); });
}

struct StudyArgs
{
    std::string scale = "desk";
    std::vector<std::size_t> lengths;
    std::vector<double> phis;
    std::vector<double> betas;
    std::vector<double> p;
    std::vector<double> q;
    std::size_t replications = 0;
    std::vector<std::string> methods;
    std::size_t boot_b = 0;
    double alpha = 0.05;
    std::string null_model = "pooled";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output_dir;
};

void write_study(const StudyResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f)
            throw DataError("cannot open " + (dir / name).string() + " for writing");
        return f;
    };
    {
        auto f = open("rejection.csv");
        f << "method,length,phi,beta,replications,evaluated,failures,reject_rate,nonreject_rate\n";
        for (const auto& cell : result.cells)
            for (const auto& t : cell.tallies)
                f << to_string(t.method) << ',' << cell.length << ',' << format_double(cell.phi) << ','
                  << format_double(cell.beta) << ',' << t.p_values.size() << ',' << t.evaluated << ',' << t.failures
                  << ',' << format_double(t.reject_rate()) << ',' << format_double(t.nonreject_rate()) << '\n';
    }
    {
        auto f = open("pvalues.csv");
        f << "length,phi,beta,replicate,method,p\n";
        for (const auto& cell : result.cells)
            for (const auto& t : cell.tallies)
                for (std::size_t r = 0; r < t.p_values.size(); ++r)
                {
                    f << cell.length << ',' << format_double(cell.phi) << ',' << format_double(cell.beta) << ',' << r + 1
                      << ',' << to_string(t.method) << ',';
                    if (!std::isnan(t.p_values[r]))
                        f << format_double(t.p_values[r]);
                    f << '\n';
                }
    }
    {
        auto f = open("concordance.csv");
        f << "length,phi,family,method_a,method_b,pairs,rho\n";
        for (const auto& c : concordance(result))
            f << c.length << ',' << format_double(c.phi) << ',' << to_string(c.family) << ',' << to_string(c.first) << ','
              << to_string(c.second) << ',' << c.pairs << ',' << format_double(c.rho) << '\n';
    }
}

void run_simstudy(const StudyArgs& a, std::ostream& out)
{
    StudyGrid grid = a.scale == "full" ? StudyGrid{} : StudyGrid::desk_scale();
    if (!a.lengths.empty())
        grid.lengths = a.lengths;
    if (!a.phis.empty())
        grid.phis = a.phis;
    if (!a.betas.empty())
        grid.betas = a.betas;
    if (!a.p.empty())
        grid.p = a.p;
    if (!a.q.empty())
        grid.q = a.q;
    if (a.replications > 0)
        grid.replications = a.replications;
    if (!a.methods.empty())
        grid.methods = parse_methods(a.methods);
    if (a.boot_b > 0)
        grid.boot_replicates = a.boot_b;
    grid.alpha = a.alpha;
    grid.null_model = *parse_null_model(a.null_model);
    grid.seed = a.seed;
    grid.parallelism = a.threads;

    const auto result = run_study(grid);
    write_study(result, a.output_dir);
    out << "wrote " << result.cells.size() << " cells to " << a.output_dir << '\n';
}

struct BenchArgs
{
    std::vector<std::size_t> chains;
    std::vector<std::size_t> categories;
    std::vector<std::size_t> lengths;
    std::size_t reps = 100;
    std::size_t boot_b = 200;
    std::vector<std::string> methods;
    double phi = 0.5;
    std::uint64_t seed = 0;
    std::string output;
};

void run_bench_command(const BenchArgs& a, std::ostream& out)
{
    BenchGrid grid;
    if (!a.chains.empty())
        grid.chains = a.chains;
    if (!a.categories.empty())
        grid.categories = a.categories;
    if (!a.lengths.empty())
        grid.lengths = a.lengths;
    if (!a.methods.empty())
        grid.methods = parse_methods(a.methods);
    grid.repetitions = a.reps;
    grid.boot_replicates = a.boot_b;
    grid.phi = a.phi;
    grid.seed = a.seed;
    for (auto c : grid.chains)
        if (c < 2)
            throw UsageError("--chains values must be at least 2");
    for (auto k : grid.categories)
        if (k < 1)
            throw UsageError("--categories values must be at least 1");
    for (auto t : grid.lengths)
        if (t < 2)
            throw UsageError("--lengths values must be at least 2");
    if (grid.boot_replicates == 0)
        throw UsageError("--boot-B must be at least 1");

    const auto rows = run_bench(grid);
    with_output(a.output, out, [&](std::ostream& o) {
        o << "method,chains,categories,length,repetitions,failures,median_s,mean_s,min_s,max_s\n";
        for (const auto& r : rows)
            o << to_string(r.method) << ',' << r.chains << ',' << r.categories << ',' << r.length << ','
              << r.repetitions << ',' << r.failures << ',' << format_double(r.median_seconds) << ','
              << format_double(r.mean_seconds) << ',' << format_double(r.min_seconds) << ','
              << format_double(r.max_seconds) << '\n';
    });
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Convergence diagnostics for MCMC draws of a categorical variable", "discretediag"};
    app.require_subcommand(1);

    DiagnoseArgs d;
    auto* diagnose = app.add_subcommand("diagnose", "Test chains or chain windows for homogeneity");
    diagnose->add_option("--input", d.input, "Chain CSV file")->required();
    diagnose->add_option("--format", d.format, "Input layout")->check(CLI::IsMember({"long", "wide"}));
    diagnose->add_flag("--no-header", d.no_header, "Input has no header row");
    diagnose->add_option("--method", d.method, "Procedure (default weiss, or billingsley for the transition family)")
        ->check(CLI::IsMember(kMethodNames));
    diagnose->add_option("--method-family", d.family, "Default procedure family")
        ->check(CLI::IsMember({"frequency", "transition"}));
    diagnose->add_option("--mode", d.mode, "Compare chains or head/tail windows")
        ->check(CLI::IsMember({"between", "within"}));
    diagnose->add_option("--window-fraction", d.window_fraction, "Window size for within mode")
        ->check(CLI::Range(0.0, 0.5));
    diagnose->add_option("--sequential", d.sequential, "Evaluate at K evenly spaced prefixes")
        ->check(CLI::PositiveNumber);
    diagnose->add_option("--checkpoints", d.checkpoints, "Explicit prefix lengths")->delimiter(',');
    diagnose->add_option("--alpha", d.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    diagnose->add_option("--boot-B", d.boot_b, "Bootstrap replicates")->check(CLI::PositiveNumber);
    diagnose->add_option("--seed", d.seed, "Random seed");
    diagnose->add_option("--null", d.null_model, "Bootstrap null model")
        ->check(CLI::IsMember({"pooled", "as-estimated"}));
    diagnose->add_option("--threads", d.threads, "Bootstrap worker threads (0 = all cores)");
    diagnose->add_option("--output", d.output, "Report path (default standard output)");
    diagnose->add_option("--report-format", d.report_format, "Report format")
        ->check(CLI::IsMember({"csv", "jsonl", "json-lines"}));

    SimulateArgs s;
    auto* simulate = app.add_subcommand("simulate", "Simulate categorical chains as wide CSV");
    simulate->add_option("--model", s.model, "Generator")->check(CLI::IsMember({"dar1", "ndarma", "markov"}));
    simulate->add_option("--p", s.p, "Marginal probabilities")->delimiter(',');
    simulate->add_option("--phi", s.phi, "DAR(1) copy probability");
    simulate->add_option("--ar", s.ar, "NDARMA weights on past values")->delimiter(',');
    simulate->add_option("--ma", s.ma, "NDARMA weights on innovations (default 1)")->delimiter(',');
    simulate->add_option("--transition", s.transition, "Markov matrix, rows ';'-separated");
    simulate->add_option("--initial", s.initial, "Markov initial distribution (default uniform)")->delimiter(',');
    simulate->add_option("--length", s.length, "Points per chain");
    simulate->add_option("--chains", s.chains, "Number of chains");
    simulate->add_option("--seed", s.seed, "Random seed");
    simulate->add_option("--output", s.output, "Output path (default standard output)");

    StudyArgs st;
    auto* simstudy = app.add_subcommand("simstudy", "Operating characteristics of all procedures");
    simstudy->add_option("--scale", st.scale, "Default grid")->check(CLI::IsMember({"desk", "full"}));
    simstudy->add_option("--lengths", st.lengths, "Segment lengths")->delimiter(',');
    simstudy->add_option("--phis", st.phis, "Autocorrelation values")->delimiter(',');
    simstudy->add_option("--betas", st.betas, "Mixture weights")->delimiter(',');
    simstudy->add_option("--p", st.p, "First marginal")->delimiter(',');
    simstudy->add_option("--q", st.q, "Second marginal")->delimiter(',');
    simstudy->add_option("--replications", st.replications, "Replications per cell");
    simstudy->add_option("--methods", st.methods, "Procedures to run")->delimiter(',')->check(CLI::IsMember(kMethodNames));
    simstudy->add_option("--boot-B", st.boot_b, "Bootstrap replicates");
    simstudy->add_option("--alpha", st.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    simstudy->add_option("--null", st.null_model, "Bootstrap null model")
        ->check(CLI::IsMember({"pooled", "as-estimated"}));
    simstudy->add_option("--seed", st.seed, "Random seed");
    simstudy->add_option("--threads", st.threads, "Worker threads (0 = all cores)");
    simstudy->add_option("--output-dir", st.output_dir, "Directory for the CSV outputs")->required();

    BenchArgs b;
    auto* bench = app.add_subcommand("bench", "Time every procedure on simulated chains");
    bench->add_option("--chains", b.chains, "Chain counts")->delimiter(',');
    bench->add_option("--categories", b.categories, "Category counts")->delimiter(',');
    bench->add_option("--lengths", b.lengths, "Chain lengths")->delimiter(',');
    bench->add_option("--reps", b.reps, "Repetitions per grid point");
    bench->add_option("--boot-B", b.boot_b, "Bootstrap replicates");
    bench->add_option("--methods", b.methods, "Procedures to time")->delimiter(',')->check(CLI::IsMember(kMethodNames));
    bench->add_option("--phi", b.phi, "DAR(1) copy probability")->check(CLI::Range(0.0, 0.999));
    bench->add_option("--seed", b.seed, "Random seed");
    bench->add_option("--output", b.output, "Output path (default standard output)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success))
        {
            app.exit(e, out, err);
            return kOk;
        }
        err << "error[usage]: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try
    {
        if (*diagnose)
            run_diagnose(d, out);
        else if (*simulate)
            run_simulate(s, out);
        else if (*simstudy)
            run_simstudy(st, out);
        else
            run_bench_command(b, out);
    }
    catch (const UsageError& e)
    {
        err << "error[usage]: " << e.what() << '\n' << app.help();
        return kUsage;
    }
    catch (const DataError& e)
    {
        err << "error[data]: " << e.what() << '\n';
        return kData;
    }
    catch (const NumericalError& e)
    {
        err << "error[numerical]: " << e.what() << '\n';
        return kNumerical;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
        err << "error[data]: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}

} // namespace discretediag::cli
