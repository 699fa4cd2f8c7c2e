// Copyright 2026 The z2frob Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: reads a problem file, runs one task and prints a JSON
// report. Exit codes: 0 success, 1 negative answer or failed precondition,
// 2 malformed input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "z2frob/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Frobenius theorem engine for Z2^n-graded coordinate charts"};
    std::string input;
    z2frob::Overrides overrides;
    std::string task, verify;
    int j_order = -1, base_order = -1;
    app.add_option("--input", input, "problem file (JSON)")->required();
    app.add_option("--task", task, "task to run, overriding the file")
        ->check(CLI::IsMember(z2frob::task_names()));
    app.add_option("--j-order", j_order, "truncation order in the ideal J")->check(CLI::NonNegativeNumber);
    app.add_option("--base-order", base_order, "truncation order in the base coordinates")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--verify", verify, "re-check the certificate in this file against the problem's fields");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (!task.empty()) overrides.task = task;
    if (j_order >= 0) overrides.j_order = j_order;
    if (base_order >= 0) overrides.base_order = base_order;
    if (!verify.empty()) overrides.verify_path = std::filesystem::absolute(verify).string();

    std::ifstream in(input);
    if (!in) {
        z2frob::Json report{{"error_kind", "ParseError"}, {"message", "cannot read '" + input + "'"}};
        std::cout << report.dump(2) << "\n";
        return 2;
    }
    std::stringstream text;
    text << in.rdbuf();
    z2frob::RunResult result =
        z2frob::run_document(text.str(), overrides, std::filesystem::absolute(input).parent_path());
    std::cout << result.report.dump(2) << "\n";
    return result.exit_code;
}
