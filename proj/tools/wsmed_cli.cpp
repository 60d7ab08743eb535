// wsmed command line: validate annotated descriptors and knowledge bases,
// run one-shot conversions and adoptions, execute composition scenarios.
//
// Exit codes: 0 success, 1 usage error, 2 descriptor/KB parse error,
// 3 ontology or consistency error, 4 unresolved semantic conflict,
// 5 scenario failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wsmed/wsmed.hpp"

namespace {

using namespace wsmed;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDocument = 2;
constexpr int kSemantic = 3;
constexpr int kInconsistent = 4;
constexpr int kScenario = 5;

struct PartRef {
    std::string path;
    std::string operation;
    std::string part;
};

// DESCRIPTOR#OPERATION.PART
std::optional<PartRef> parse_part_ref(const std::string& text) {
    std::size_t hash = text.rfind('#');
    if (hash == std::string::npos || hash == 0 || hash + 1 >= text.size()) return std::nullopt;
    std::string rest = text.substr(hash + 1);
    std::size_t dot = rest.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= rest.size()) return std::nullopt;
    return PartRef{text.substr(0, hash), rest.substr(0, dot), rest.substr(dot + 1)};
}

KnowledgeBase load_kb(const std::string& path) {
    return load_knowledge_base(detail::read_file(path));
}

AnnotatedDescriptor load_descriptor(const std::string& path) {
    return parse_descriptor(detail::read_file(path));
}

int cmd_validate(const std::string& kb_path, const std::vector<std::string>& paths, bool quiet) {
    std::optional<KnowledgeBase> kb;
    int status = kOk;
    auto report = [&](const std::string& path, const char* what, int code) {
        std::cerr << fmt::format("{}: {}\n", path, what);
        if (status == kOk) status = code;
    };

    if (!kb_path.empty()) {
        try {
            kb = load_kb(kb_path);
        } catch (const DocumentError& e) {
            report(kb_path, e.what(), kDocument);
        } catch (const SemanticError& e) {
            report(kb_path, e.what(), kSemantic);
        }
    }

    for (const std::string& path : paths) {
        try {
            if (std::filesystem::path(path).extension() == ".toml") {
                load_kb(path);
            } else {
                AnnotatedDescriptor d = load_descriptor(path);
                if (kb) {
                    for (const auto& op : d.operations) {
                        for (const auto& parts : {&op.inputs, &op.outputs})
                            for (const auto& part : *parts) part_context(*kb, part);
                    }
                }
            }
            if (!quiet) std::cerr << fmt::format("{}: ok\n", path);
        } catch (const DocumentError& e) {
            report(path, e.what(), kDocument);
        } catch (const SemanticError& e) {
            report(path, e.what(), kSemantic);
        }
    }
    return status;
}

int cmd_convert(const std::string& kb_path, const std::string& value, const std::string& from,
                const std::string& to, bool explain, bool quiet) {
    auto from_ref = parse_part_ref(from);
    auto to_ref = parse_part_ref(to);
    if (!from_ref || !to_ref) {
        std::cerr << "convert: part references use DESCRIPTOR#OPERATION.PART\n";
        return kUsage;
    }
    KnowledgeBase kb = load_kb(kb_path);
    AnnotatedDescriptor src = load_descriptor(from_ref->path);
    AnnotatedDescriptor tgt = load_descriptor(to_ref->path);
    const MessagePart& src_part = find_part(src, from_ref->operation, from_ref->part);
    const MessagePart& tgt_part = find_part(tgt, to_ref->operation, to_ref->part);

    SemanticObject object = build_semantic_object(kb, src_part, value);
    Context target = part_context(kb, tgt_part);
    auto [converted, report] = convert(kb, object, target);

    if (explain)
        for (const std::string& line : report_lines(report)) std::cout << line << "\n";
    std::cout << render_raw(converted.value, converted.type) << "\n";
    (void)quiet;
    return kOk;
}

int cmd_adopt(const std::string& kb_path, const std::string& master_path, const std::string& failed_path,
              const std::string& out_path, bool quiet) {
    KnowledgeBase kb = load_kb(kb_path);
    AnnotatedDescriptor master = load_descriptor(master_path);
    AnnotatedDescriptor failed = load_descriptor(failed_path);
    AnnotatedDescriptor adopted = adopt_context(kb, master, failed);
    detail::write_file(out_path, serialize_descriptor(adopted));

    if (!quiet) {
        for (std::size_t oi = 0; oi < master.operations.size(); ++oi) {
            const auto& before_op = master.operations[oi];
            const auto& after_op = adopted.operations[oi];
            for (Direction dir : {Direction::Input, Direction::Output}) {
                const auto& before_parts = dir == Direction::Input ? before_op.inputs : before_op.outputs;
                const auto& after_parts = dir == Direction::Input ? after_op.inputs : after_op.outputs;
                for (std::size_t pi = 0; pi < before_parts.size(); ++pi) {
                    if (before_parts[pi].annotation == after_parts[pi].annotation) continue;
                    std::cout << fmt::format("{} {} {}:\n- {}\n+ {}\n", before_op.name, to_string(dir),
                                             before_parts[pi].name,
                                             serialize_context_annotation(before_parts[pi].annotation),
                                             serialize_context_annotation(after_parts[pi].annotation));
                }
            }
        }
    }
    return kOk;
}

int cmd_run(const std::string& kb_path, const std::string& scenario_path, bool no_adopt,
            const std::string& trace_path, std::optional<std::uint64_t> seed, bool quiet) {
    KnowledgeBase kb = load_kb(kb_path);
    Scenario scenario = load_scenario_file(kb, scenario_path);
    if (seed) scenario.seed = *seed;

    ExecutionResult result = run_scenario(kb, scenario, ExecOptions{!no_adopt});

    if (!trace_path.empty()) detail::write_file(trace_path, result.trace.to_text());

    if (!quiet) {
        for (const auto& [key, raw] : result.deliveries) {
            const auto& [round, step, part] = key;
            if (round == scenario.rounds) std::cout << fmt::format("{}.{} = {}\n", step, part, raw);
        }
    }
    if (result.consistent && result.completed) {
        std::cout << "CONSISTENT\n";
        return kOk;
    }
    std::cout << "INCONSISTENT\n";
    for (const auto& edge : result.conflicts)
        std::cout << fmt::format("conflict: {} [{}]\n", edge.id(), edge.concept_id.name);
    return kInconsistent;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-mediated service composition simulator"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress informational output");

    auto* validate = app.add_subcommand("validate", "parse descriptors and knowledge bases");
    std::string v_kb;
    std::vector<std::string> v_paths;
    validate->add_option("--kb", v_kb, "knowledge base to resolve annotations against");
    validate->add_option("paths", v_paths, "descriptor (.desc) or knowledge-base (.toml) files")->required();

    auto* convert = app.add_subcommand("convert", "convert a value between two part contexts");
    std::string c_kb, c_value, c_from, c_to;
    bool c_explain = false;
    convert->add_option("--kb", c_kb, "knowledge base")->required();
    convert->add_option("--value", c_value, "raw value to convert")->required();
    convert->add_option("--from", c_from, "source part, DESCRIPTOR#OPERATION.PART")->required();
    convert->add_option("--to", c_to, "target part, DESCRIPTOR#OPERATION.PART")->required();
    convert->add_flag("--explain", c_explain, "print one line per converted modifier");

    auto* adopt = app.add_subcommand("adopt", "adopt a failed service's context into a master descriptor");
    std::string a_kb, a_master, a_failed, a_out;
    adopt->add_option("--kb", a_kb, "knowledge base")->required();
    adopt->add_option("--master", a_master, "master descriptor")->required();
    adopt->add_option("--failed", a_failed, "failed service descriptor")->required();
    adopt->add_option("--out", a_out, "path for the adopted descriptor")->required();

    auto* run = app.add_subcommand("run", "execute a scenario");
    std::string r_kb, r_scenario, r_trace;
    bool r_no_adopt = false;
    std::optional<std::uint64_t> r_seed;
    run->add_option("scenario", r_scenario, "scenario file")->required();
    run->add_option("--kb", r_kb, "knowledge base")->required();
    run->add_flag("--no-adopt", r_no_adopt, "skip context adoption before substitution (diagnostic)");
    run->add_option("--trace", r_trace, "write the execution trace to this file");
    run->add_option("--seed", r_seed, "scenario seed override");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(v_kb, v_paths, quiet);
        if (convert->parsed()) return cmd_convert(c_kb, c_value, c_from, c_to, c_explain, quiet);
        if (adopt->parsed()) return cmd_adopt(a_kb, a_master, a_failed, a_out, quiet);
        if (run->parsed()) return cmd_run(r_kb, r_scenario, r_no_adopt, r_trace, r_seed, quiet);
    } catch (const DocumentError& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kDocument;
    } catch (const ScenarioError& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kScenario;
    } catch (const SemanticError& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kSemantic;
    } catch (const std::exception& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kUsage;
    }
    return kUsage;
}
