"""Output formatting module for command reports."""

import csv
import io
import json
from typing import Any, Dict, List


def format_float(value: float) -> str:
    """A float with 17 significant digits."""
    return format(float(value), ".17g")


def split_value(value: Any) -> List[str]:
    """[re, im] strings for a serialized scalar ("p/q" string or [re, im] pair)."""
    if isinstance(value, str):
        return [value, "0"]
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return [format_float(value[0]), format_float(value[1])]
    if isinstance(value, bool) or value is None:
        return [str(value).lower(), ""]
    if isinstance(value, float):
        return [format_float(value), "0"]
    return [str(value), "0"]


class OutputFormatter:
    """Formats command reports for output in various formats."""

    @staticmethod
    def format_json(report: Dict[str, Any]) -> str:
        """
        Formats a report as JSON with sorted keys.

        Identical reports give byte-identical output.

        Args:
            report: Report dictionary built by one of the commands

        Returns:
            JSON string ending in a newline
        """
        return json.dumps(report, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def csv_rows(report: Dict[str, Any]) -> List[List[str]]:
        """
        Flattens a report into CSV rows, header first.

        eigen reports give one row per order (l, re, im); poly reports one
        row per polynomial coefficient (l, power, re, im); verify reports a
        single summary row; eval reports one (quantity, re, im) row each.

        Args:
            report: Report dictionary built by one of the commands

        Returns:
            List of rows
        """
        command = report.get("command")
        if command == "eigen":
            rows = [["l", "re", "im"]]
            for ell, value in enumerate(report["E_coeffs"]):
                rows.append([str(ell)] + split_value(value))
            return rows
        if command == "poly":
            rows = [["l", "power", "re", "im"]]
            for ell, block in enumerate(report["poly"]):
                for power, value in enumerate(block):
                    rows.append([str(ell), str(power)] + split_value(value))
            return rows
        if command == "verify":
            return [
                ["suite", "cases", "max_deviation", "pass"],
                [
                    report["suite"],
                    str(report["cases"]),
                    format_float(report["max_deviation"]),
                    str(report["pass"]).lower(),
                ],
            ]
        if command == "eval":
            rows = [["quantity", "re", "im"]]
            for key in ("x", "tau", "psi", "E"):
                rows.append([key] + split_value(report[key]))
            rows.append(["relative_residual", format_float(report["relative_residual"]), "0"])
            return rows
        raise ValueError(f"No CSV layout for command: {command}")

    @staticmethod
    def format_csv(report: Dict[str, Any]) -> str:
        """
        Formats a report as CSV with a header row.

        Args:
            report: Report dictionary built by one of the commands

        Returns:
            CSV formatted string
        """
        output = io.StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerows(OutputFormatter.csv_rows(report))
        return output.getvalue()

    @staticmethod
    def format_report(report: Dict[str, Any], format_type: str = "json") -> str:
        """
        Formats a report according to specified format type.

        Args:
            report: Report dictionary built by one of the commands
            format_type: One of "json", "csv"

        Returns:
            Formatted string ready for output

        Raises:
            ValueError: If format_type is not recognized
        """
        if format_type == "json":
            return OutputFormatter.format_json(report)
        elif format_type == "csv":
            return OutputFormatter.format_csv(report)
        else:
            raise ValueError(
                f"Invalid format type: {format_type}. "
                f"Valid options are: json, csv"
            )
