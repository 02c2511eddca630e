/**
 * Schema-generated data-entry forms.
 *
 * Fields come straight from the managed data type's schema, so a new data
 * type in the repository needs no UI change.  Identifier fields whose
 * bound slot data carries matching records become selects (the effort
 * form's activity picker is the activity list entry's content).
 */

import type { DataTypeDef, FormDescriptor, ScalarType } from "./types.js";
import { validateBatch, type RowRejection } from "./validate.js";

export interface FormFieldModel {
  name: string;
  type: ScalarType;
  optional: boolean;
  /** input control: select when options exist, else a typed input */
  control: "select" | "text" | "number" | "date";
  options?: string[];
}

const NUMBER_TYPES: ScalarType[] = ["duration-hours", "money", "count", "fraction"];

function idsOf(data: { records: Record<string, unknown>[] }): string[] {
  const ids = data.records
    .map((record) => record["id"])
    .filter((v): v is string => typeof v === "string" && v.length > 0);
  return [...new Set(ids)].sort();
}

function optionsFor(field: string, descriptor: FormDescriptor): string[] | undefined {
  if (!field.endsWith("-id")) return undefined;
  const stem = field.slice(0, -3);
  // singular stems match their plural slot ("activity" / "activities")
  const base = stem.length > 2 ? stem.slice(0, -1) : stem;
  const slots = Object.entries(descriptor["slot-data"] ?? {});
  for (const [slotName, data] of slots) {
    if (!slotName.startsWith(base)) continue;
    const ids = idsOf(data);
    if (ids.length) return ids;
  }
  for (const [, data] of slots) {
    const ids = idsOf(data);
    if (ids.length) return ids;
  }
  return undefined;
}

export function buildFormModel(descriptor: FormDescriptor): FormFieldModel[] {
  return descriptor.schema.schema.map((field) => {
    const options = optionsFor(field.name, descriptor);
    const control: FormFieldModel["control"] = options
      ? "select"
      : field.type === "timestamp"
        ? "date"
        : NUMBER_TYPES.includes(field.type)
          ? "number"
          : "text";
    const model: FormFieldModel = {
      name: field.name,
      type: field.type,
      optional: field.optional,
      control,
    };
    if (options) model.options = options;
    return model;
  });
}

/** Raw input strings -> one record; empty inputs are omitted so optional
 * fields stay absent and mandatory ones fail validation loudly. */
export function recordFromInputs(
  fields: FormFieldModel[],
  raw: Record<string, string>,
): Record<string, unknown> {
  const record: Record<string, unknown> = {};
  for (const field of fields) {
    const value = (raw[field.name] ?? "").trim();
    if (value === "") continue;
    record[field.name] = value;
  }
  return record;
}

export interface ClientValidation {
  accepted: Record<string, unknown>[];
  rejected: RowRejection[];
}

/** Validate a whole submission client-side, mirroring the server. */
export function validateSubmission(
  schema: DataTypeDef,
  records: Record<string, unknown>[],
): ClientValidation {
  return validateBatch(schema, records);
}
