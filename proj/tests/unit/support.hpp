#ifndef WSMED_TESTS_SUPPORT_HPP
#define WSMED_TESTS_SUPPORT_HPP

#include <filesystem>
#include <string>

#include "wsmed/wsmed.hpp"

namespace testsup {

inline std::filesystem::path fixtures() { return std::filesystem::path(WSMED_FIXTURES); }

inline std::string slurp(const std::string& rel) { return wsmed::detail::read_file(fixtures() / rel); }

inline const wsmed::KnowledgeBase& kb() {
    static wsmed::KnowledgeBase k = wsmed::load_knowledge_base(slurp("kb.toml"));
    return k;
}

inline wsmed::AnnotatedDescriptor descriptor(const std::string& name) {
    return wsmed::parse_descriptor(slurp("descriptors/" + name));
}

// fully inferred context straight from an annotation string
inline wsmed::Context context_of(const wsmed::KnowledgeBase& k, const std::string& annotation) {
    wsmed::MessagePart part{"probe", wsmed::LexicalType::String,
                            wsmed::parse_context_annotation(annotation, "probe"),
                            wsmed::Direction::Input};
    return wsmed::part_context(k, part);
}

inline wsmed::Scenario scenario(const std::string& rel) {
    return wsmed::load_scenario_file(kb(), fixtures() / rel);
}

} // namespace testsup

#endif
