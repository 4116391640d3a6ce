// Traces of a few triangle-group words in the integral level-one representation.
#include <veech/veech.hpp>

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> words{"T", "ST", "(ST)^5", "TS", "STT", "ST^2ST^-1", "(STT)^2"};
    for (int i = 1; i < argc; ++i) words.push_back(argv[i]);
    for (const auto& text : words) {
        const auto w = veech::parse_word(text);
        const auto v = veech::evaluate_word_level_one(w);
        std::cout << text << "  trace " << v.trace << "  det " << v.det << '\n' << v.matrix.to_string() << '\n';
    }
}
