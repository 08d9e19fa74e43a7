#include <CLI11.hpp>

#include <diracq/corpus.hpp>
#include <diracq/report.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw diracq::ParseError(0, 0, "cannot read file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const diracq::Report& report, const std::string& json_path) {
    std::cout << diracq::to_text(report);
    if (json_path.empty()) return;
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw diracq::AlgorithmError("cannot write '" + json_path + "'");
    out << diracq::to_json(report).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint analysis and lattice quantization for finite-dimensional models"};
    app.require_subcommand(1);

    std::string a_file, a_json;
    int max_gen = 20, degree_cap = 12;
    CLI::App* analyze = app.add_subcommand("analyze", "run the constraint algorithm on a model file");
    analyze->add_option("file", a_file, "model file")->required();
    analyze->add_option("--json", a_json, "also write a structured report to this path");
    analyze->add_option("--max-gen", max_gen, "generation cap for the consistency loop");
    analyze->add_option("--degree-cap", degree_cap, "degree cap for the constraint ideal basis");

    std::string q_file, q_json;
    int sites = 0;
    double hbar = 1.0;
    CLI::App* quantize =
        app.add_subcommand("quantize", "analyze, then check the operator correspondence");
    quantize->add_option("file", q_file, "model file")->required();
    quantize->add_option("--sites", sites, "odd lattice size per dimension")->required();
    quantize->add_option("--hbar", hbar, "Planck constant for the representation")->required();
    quantize->add_option("--json", q_json, "also write a structured report to this path");

    app.add_subcommand("corpus", "list bundled models and their expected headline results");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            diracq::Model m = diracq::parse_model(slurp(a_file));
            diracq::AnalysisOptions opts;
            opts.max_generations = max_gen;
            opts.degree_cap = degree_cap;
            diracq::Report report = diracq::build_report(diracq::run_algorithm(m, opts));
            emit(report, a_json);
        } else if (quantize->parsed()) {
            diracq::Model m = diracq::parse_model(slurp(q_file));
            diracq::ConstraintAnalysis an = diracq::run_algorithm(m);
            diracq::Report report = diracq::build_report(an);
            diracq::attach_quantization(report, an, sites, hbar);
            emit(report, q_json);
        } else {
            std::cout << diracq::corpus_text();
        }
    } catch (const diracq::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const diracq::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 3;
    } catch (const diracq::AlgorithmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
