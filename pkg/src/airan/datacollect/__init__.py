"""Task-driven data collection: filter DSL, collection tasks, AI bearer and cross-domain sources."""
from .bearer import Admission, AiBearer, AiPayload, BearerLink, PayloadNotAllowed, admit_ai_traffic
from .crossdomain import (CrossDomainCollector, Domain, SourceAdapter, SourceUnavailable,
                          collect_cross_domain, scripted_app_server)
from .filters import (And, Comparison, FilterExpr, FilterSyntaxError, FilterTypeError, Membership,
                      MissingAttribute, Not, Or, compile_filter, eval_filter, format_filter,
                      parse_filter, referenced_fields)
from .schema import DEFAULT_SCHEMA, AttrType, DataRecord, Schema, SchemaViolation, UnknownField, record_bits
from .tasks import (BudgetInvalid, CollectionService, CollectionTask, DeadlineClass, Scope, TaskStats,
                    UnreachableDestination)
