"""Small Java files with hand-enumerated node and edge histograms."""

CU = "compilation_unit"

# Hand-enumerated from the Java grammar: named nodes only, one edge per
# parent/child pair.
PROFILES = {
    "empty_class": (
        "class A {}",
        {CU: 1, "class_declaration": 1, "identifier": 1, "class_body": 1},
        {"compilation_unit→class_declaration": 1, "class_declaration→identifier": 1,
         "class_declaration→class_body": 1},
    ),
    "field": (
        "class A { int x; }",
        {CU: 1, "class_declaration": 1, "identifier": 2, "class_body": 1, "field_declaration": 1,
         "integral_type": 1, "variable_declarator": 1},
        {"compilation_unit→class_declaration": 1, "class_declaration→identifier": 1,
         "class_declaration→class_body": 1, "class_body→field_declaration": 1,
         "field_declaration→integral_type": 1, "field_declaration→variable_declarator": 1,
         "variable_declarator→identifier": 1},
    ),
    "void_method": (
        "class A { void f() { return; } }",
        {CU: 1, "class_declaration": 1, "identifier": 2, "class_body": 1, "method_declaration": 1,
         "void_type": 1, "formal_parameters": 1, "block": 1, "return_statement": 1},
        {"compilation_unit→class_declaration": 1, "class_declaration→identifier": 1,
         "class_declaration→class_body": 1, "class_body→method_declaration": 1,
         "method_declaration→void_type": 1, "method_declaration→identifier": 1,
         "method_declaration→formal_parameters": 1, "method_declaration→block": 1,
         "block→return_statement": 1},
    ),
    "import_interface": (
        "import java.util.List;\ninterface I { }",
        {CU: 1, "import_declaration": 1, "scoped_identifier": 2, "identifier": 4,
         "interface_declaration": 1, "interface_body": 1},
        {"compilation_unit→import_declaration": 1, "import_declaration→scoped_identifier": 1,
         "scoped_identifier→scoped_identifier": 1, "scoped_identifier→identifier": 3,
         "compilation_unit→interface_declaration": 1, "interface_declaration→identifier": 1,
         "interface_declaration→interface_body": 1},
    ),
    "expression": (
        "class A { int f(int a) { return a + 1; } }",
        {CU: 1, "class_declaration": 1, "identifier": 4, "class_body": 1, "method_declaration": 1,
         "integral_type": 2, "formal_parameters": 1, "formal_parameter": 1, "block": 1,
         "return_statement": 1, "binary_expression": 1, "decimal_integer_literal": 1},
        {"compilation_unit→class_declaration": 1, "class_declaration→identifier": 1,
         "class_declaration→class_body": 1, "class_body→method_declaration": 1,
         "method_declaration→integral_type": 1, "method_declaration→identifier": 1,
         "method_declaration→formal_parameters": 1, "method_declaration→block": 1,
         "formal_parameters→formal_parameter": 1, "formal_parameter→integral_type": 1,
         "formal_parameter→identifier": 1, "block→return_statement": 1,
         "return_statement→binary_expression": 1, "binary_expression→identifier": 1,
         "binary_expression→decimal_integer_literal": 1},
    ),
}
