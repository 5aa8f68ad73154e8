#pragma once

#include <filesystem>
#include <string>

namespace kgex {

// Prompts are assembled from four blocks, joined by blank lines in this
// order. Blocks may use the placeholders {subject}, {relation} and {input}.
struct PromptTemplate {
    std::string definition;  // what a triple / an answer is
    std::string role;        // who the model should act as
    std::string input;       // the query itself
    std::string formatting;  // required output shape

    static PromptTemplate triple_defaults();  // tail generation for (subject, relation)
    static PromptTemplate verify_defaults();  // yes/no visual cross-check

    // Block file: "[definition]" style section headers, body kept verbatim.
    static PromptTemplate load(const std::filesystem::path& path);
};

struct PromptContext {
    std::string subject;
    std::string relation;
    std::string input;
};

// Substitutes placeholders and joins the non-empty blocks. A placeholder
// whose context value is empty raises MissingContextError; an unknown
// placeholder name raises ConfigError.
std::string render_prompt(const PromptTemplate& tmpl, const PromptContext& context);

}  // namespace kgex
