#include "discretediag/bootstrap.hpp"
#include "discretediag/chain_model.hpp"
#include "discretediag/diagnose.hpp"
#include "discretediag/error.hpp"
#include "discretediag/io.hpp"
#include "discretediag/simulate.hpp"
#include "discretediag/special_functions.hpp"
#include "discretediag/stat_tests.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace discretediag;

namespace
{

BootstrapConfig make_config(std::size_t replicates, std::uint64_t seed, unsigned threads, const std::string& null_model)
{
    const auto model = parse_null_model(null_model);
    if (!model)
        throw py::value_error("null_model must be 'pooled' or 'as-estimated'");
    return BootstrapConfig{replicates, seed, threads, *model};
}

Method method_from(const std::string& name)
{
    const auto m = parse_method(name);
    if (!m)
        throw py::value_error("unknown method '" + name + "'");
    return *m;
}

DiagnosticRequest make_request(const std::string& method, double window_fraction, double alpha,
                               std::size_t checkpoints, std::size_t replicates, std::uint64_t seed, unsigned threads,
                               const std::string& null_model)
{
    DiagnosticRequest req;
    req.method = method_from(method);
    req.window_fraction = window_fraction;
    req.alpha = alpha;
    req.checkpoint_count = checkpoints;
    req.bootstrap = make_config(replicates, seed, threads, null_model);
    return req;
}

std::vector<std::string> warning_names(const TestOutcome& o)
{
    std::vector<std::string> out;
    for (auto w : o.warnings)
        out.emplace_back(to_string(w));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Convergence diagnostics for categorical MCMC output";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<InsufficientVariationError>(m, "InsufficientVariationError", m.attr("DataError").ptr());
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<SegmentSet>(m, "SegmentSet")
        .def(py::init([](std::vector<Sequence> segments, std::size_t categories) {
                 return SegmentSet(CategoryAlphabet::indexed(categories), std::move(segments));
             }),
             py::arg("segments"), py::arg("categories"),
             "Segments of 0-based category indices over an alphabet of `categories` labels 1..r")
        .def_property_readonly("segments", &SegmentSet::segments)
        .def_property_readonly("labels", [](const SegmentSet& s) { return s.alphabet().labels(); })
        .def_property_readonly("names", &SegmentSet::names)
        .def("__len__", &SegmentSet::count);

    m.def("encode", &encode, py::arg("raw"), py::arg("names") = std::vector<std::string>{},
          "Encode label sequences over the sorted union of their labels");
    m.def("decode", &decode, py::arg("set"));
    m.def("split_within", [](const SegmentSet& s, std::size_t chain, double fraction) {
        return split_within(s.segment(chain), s.alphabet(), fraction);
    }, py::arg("set"), py::arg("chain"), py::arg("fraction") = kDefaultWindowFraction);
    m.def("read_chain_csv", [](const std::string& path, const std::string& format, bool header) {
        const auto f = parse_chain_format(format);
        if (!f)
            throw py::value_error("format must be 'long' or 'wide'");
        return read_chain_csv(path, CsvOptions{*f, header});
    }, py::arg("path"), py::arg("format") = "long", py::arg("header") = true);

    m.def("regularized_gamma_p", &regularized_gamma_p, py::arg("a"), py::arg("x"));
    m.def("regularized_gamma_q", &regularized_gamma_q, py::arg("a"), py::arg("x"));
    m.def("chi_squared_sf", &chi_squared_sf, py::arg("df"), py::arg("x"));

    py::class_<TestOutcome>(m, "TestOutcome")
        .def_property_readonly("method", [](const TestOutcome& o) { return std::string(to_string(o.method)); })
        .def_readonly("statistic", &TestOutcome::statistic)
        .def_readonly("df", &TestOutcome::df)
        .def_readonly("replicates", &TestOutcome::replicates)
        .def_readonly("p_value", &TestOutcome::p_value)
        .def_property_readonly("warnings", &warning_names)
        .def("__repr__", [](const TestOutcome& o) {
            std::ostringstream s;
            s << "TestOutcome(method=" << to_string(o.method) << ", statistic=" << o.statistic
              << ", p_value=" << o.p_value << ")";
            return s.str();
        });

    py::class_<Dar1Estimate>(m, "Dar1Estimate")
        .def_readonly("phi_hat", &Dar1Estimate::phi_hat)
        .def_readonly("c_hat", &Dar1Estimate::c_hat)
        .def_readonly("clamped", &Dar1Estimate::clamped)
        .def_readonly("segment_marginals", &Dar1Estimate::segment_marginals)
        .def_readonly("pooled_marginal", &Dar1Estimate::pooled_marginal);

    m.def("kappa_hat", &kappa_hat, py::arg("set"), py::arg("lag") = 1);
    m.def("estimate_dar1", &estimate_dar1, py::arg("set"));
    m.def("hangartner_test", [](const SegmentSet& s) { return hangartner_test(frequency_table(s)); }, py::arg("set"));
    m.def("weiss_test", &weiss_test, py::arg("set"));
    m.def("billingsley_test", [](const SegmentSet& s) { return billingsley_test(transition_table(s)); }, py::arg("set"));

    const auto boot = [&m](const char* name, TestOutcome (*fn)(const SegmentSet&, const BootstrapConfig&)) {
        m.def(name, [fn](const SegmentSet& s, std::size_t replicates, std::uint64_t seed, unsigned threads,
                         const std::string& null_model) {
            const auto cfg = make_config(replicates, seed, threads, null_model);
            py::gil_scoped_release release;
            return fn(s, cfg);
        }, py::arg("set"), py::arg("replicates") = 1000, py::arg("seed") = 0, py::arg("threads") = 1,
              py::arg("null_model") = "pooled");
    };
    boot("darboot_test", &darboot_test);
    boot("mcboot_test", &mcboot_test);
    boot("billingsley_boot_test", &billingsley_boot_test);
    m.def("bootstrap_pvalue", [](double observed, const std::vector<double>& reps) {
        return bootstrap_pvalue(observed, reps);
    }, py::arg("observed"), py::arg("replicates"));

    m.def("simulate_dar1", [](const std::vector<double>& p, double phi, std::size_t length, std::uint64_t seed,
                              std::uint64_t stream) {
        auto rng = derive_stream(seed, stream);
        return simulate_dar1(Dar1Params{p, phi}, length, rng);
    }, py::arg("p"), py::arg("phi"), py::arg("length"), py::arg("seed") = 0, py::arg("stream") = 0);
    m.def("simulate_ndarma", [](const std::vector<double>& p, const std::vector<double>& ar,
                                const std::vector<double>& ma, std::size_t length, std::uint64_t seed,
                                std::uint64_t stream) {
        auto rng = derive_stream(seed, stream);
        return simulate_ndarma(NdarmaParams{p, ar, ma}, length, rng);
    }, py::arg("p"), py::arg("ar"), py::arg("ma"), py::arg("length"), py::arg("seed") = 0, py::arg("stream") = 0);
    m.def("simulate_markov", [](const std::vector<std::vector<double>>& transition, const std::vector<double>& initial,
                                std::size_t length, std::uint64_t seed, std::uint64_t stream) {
        auto rng = derive_stream(seed, stream);
        return simulate_markov(MarkovParams{transition, initial}, length, rng);
    }, py::arg("transition"), py::arg("initial"), py::arg("length"), py::arg("seed") = 0, py::arg("stream") = 0);

    const auto diag = [&m](const char* name, DiagnosticReport (*fn)(const SegmentSet&, const DiagnosticRequest&)) {
        m.def(name, [fn](const SegmentSet& s, const std::string& method, double window_fraction, double alpha,
                         std::size_t checkpoints, std::size_t replicates, std::uint64_t seed, unsigned threads,
                         const std::string& null_model, const std::string& format) {
            const auto req = make_request(method, window_fraction, alpha, checkpoints, replicates, seed, threads,
                                          null_model);
            const auto f = parse_report_format(format);
            if (!f)
                throw py::value_error("format must be 'csv' or 'jsonl'");
            std::ostringstream out;
            write_report(fn(s, req), out, *f);
            return out.str();
        }, py::arg("set"), py::arg("method") = "weiss", py::arg("window_fraction") = kDefaultWindowFraction,
              py::arg("alpha") = 0.05, py::arg("checkpoints") = kDefaultCheckpoints, py::arg("replicates") = 1000,
              py::arg("seed") = 0, py::arg("threads") = 1, py::arg("null_model") = "pooled",
              py::arg("format") = "csv", "Run the diagnostic and return the serialized report");
    };
    diag("run_between", &run_between);
    diag("run_within", &run_within);
    diag("run_sequential", &run_sequential);
}
