from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict

from mdivw.utils.error_handling import SchemaError


class ColumnSchema(BaseModel):
    """Maps the canonical roles onto the column names of a GWAS export."""

    model_config = ConfigDict(frozen=True)

    snp_id: str = "SNP"
    beta: str = "beta"
    se: str = "se"

    @classmethod
    def from_mapping(cls, mapping: Optional[str | Dict[str, str]]) -> "ColumnSchema":
        """Build from ``{"snp_id": "rsid"}`` or the CLI form ``"snp_id=rsid,beta=b"``."""
        if not mapping:
            return cls()
        if isinstance(mapping, str):
            pairs = {}
            for item in mapping.split(","):
                if not item.strip():
                    continue
                if "=" not in item:
                    raise SchemaError(f"Schema entry '{item}' must look like key=column")
                key, column = item.split("=", 1)
                pairs[key.strip()] = column.strip()
            mapping = pairs
        unknown = set(mapping) - set(cls.model_fields)
        if unknown:
            raise SchemaError(f"Unknown schema keys: {sorted(unknown)}")
        return cls(**mapping)

    def columns(self) -> Dict[str, str]:
        return {"snp_id": self.snp_id, "beta": self.beta, "se": self.se}
