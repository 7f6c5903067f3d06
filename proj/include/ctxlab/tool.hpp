#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxlab/context.hpp"
#include "ctxlab/result.hpp"

namespace ctxlab {

struct ToolParam {
    std::string name;
    ValueType type = ValueType::Text;
    std::string description;
};

/// Bridge between the context space and a program function. The call item
/// carries a JSON object of arguments; the hook maps arguments to a result,
/// which is serialized back into a Tool-role context item.
struct ToolDescriptor {
    std::string name;
    std::string description;
    std::vector<ToolParam> params;
    std::function<nlohmann::json(const nlohmann::json&)> hook;
};

/// Parses the call item against the descriptor's parameter schema, runs the
/// hook, and returns `context` extended with the Tool-role result item. A
/// hook failure is serialized as a Tool-role item starting with "error:"
/// rather than propagating.
ContextItem invoke_tool(const ToolDescriptor& descriptor,
                        const ContextItem& call_item,
                        const ContextItem& context);

/// Validates a JSON argument object against the descriptor's parameters.
/// Throws ParseError naming the first missing or mistyped parameter.
void check_tool_args(const ToolDescriptor& descriptor,
                     const nlohmann::json& args);

/// Renders a hook result as context text: strings verbatim, anything else as
/// compact JSON.
std::string tool_result_text(const nlohmann::json& result);

}  // namespace ctxlab
