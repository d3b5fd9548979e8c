// Wire types: field names mirror the curation-service payloads exactly.

export type EventStatus = "pending" | "accepted" | "rejected";
export type Decision = "accept" | "reject";

export interface Provenance {
  source_url: string;
  fetched_at: string;
  extractor: string;
}

export interface ChangeEvent {
  event_id: string;
  entity_id: string;
  field: string;
  old_value: unknown;
  new_value: unknown;
  evidence: Provenance;
  excerpt: string;
  status: EventStatus;
  decided_by: string | null;
  decided_at: string | null;
  created_at: string | null;
}

export interface QueueResponse {
  events: ChangeEvent[];
  cursor: string | null;
  counts: Record<EventStatus, number>;
}

export interface CompanySummary {
  id: string;
  canonical_name: string;
  aliases: string[];
  country: string;
  website: string | null;
  personnel: [string, string][];
  phones: string[];
  domain_tags: string[];
}

export interface AuditResponse {
  entries: Record<string, unknown>[];
  cursor: string | null;
}
