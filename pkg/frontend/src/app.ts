/** Controller: maps user gestures to API calls and folds responses into state.
 *
 * Exactly one API call per mutating gesture; no optimistic updates — the
 * state changes only from what the server returned. The render callback is
 * invoked after every state change.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  ViewState,
  applyBookmark,
  applyGrowth,
  applyHints,
  applySession,
  bookmarkPanel,
  initialState,
  selectNode,
  setChartExpanded,
  setError,
  setPendingGeneration,
} from "./state.js";
import type { NodeOut } from "./types.js";

export class App {
  state: ViewState = initialState();

  constructor(
    private client: ApiClient,
    private render: (state: ViewState) => void = () => {},
  ) {}

  private commit(state: ViewState): void {
    this.state = state;
    this.render(this.state);
  }

  bookmarks(): NodeOut[] {
    return bookmarkPanel(this.state);
  }

  async createSession(dataset: Blob, filename: string, intent: string): Promise<void> {
    try {
      const response = await this.client.createSession(dataset, filename, intent);
      this.commit(applySession(this.state, response));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Node click: select it and fetch its hints (the server logs the click). */
  async clickNode(nodeId: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.state.nodes[nodeId] === undefined) return;
    if (this.state.nodes[nodeId]!.parent_id === null) {
      this.commit(selectNode(this.state, nodeId));
      return; // the intent node has no hints
    }
    try {
      const hints = await this.client.hints(sessionId, nodeId, false);
      this.commit(applyHints(selectNode(this.state, nodeId), nodeId, hints));
    } catch (error) {
      this.fail(error);
    }
  }

  async branch(nodeId: string, userInput?: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.state.pendingGeneration) return;
    this.commit(setPendingGeneration(this.state, true));
    try {
      const response = await this.client.branch(sessionId, nodeId, userInput);
      this.commit(setPendingGeneration(applyGrowth(this.state, response), false));
    } catch (error) {
      this.commit(setPendingGeneration(this.state, false));
      this.fail(error);
    }
  }

  async regenerate(nodeId: string, userInput?: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.state.pendingGeneration) return;
    this.commit(setPendingGeneration(this.state, true));
    try {
      const response = await this.client.regenerate(sessionId, nodeId, userInput);
      this.commit(setPendingGeneration(applyGrowth(this.state, response), false));
    } catch (error) {
      this.commit(setPendingGeneration(this.state, false));
      this.fail(error);
    }
  }

  async toggleBookmark(nodeId: string): Promise<void> {
    const sessionId = this.state.sessionId;
    const node = this.state.nodes[nodeId];
    if (sessionId === null || node === undefined) return;
    try {
      const updated = await this.client.bookmark(sessionId, nodeId, !node.bookmarked);
      this.commit(applyBookmark(this.state, updated));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Chart expansion re-fetches hints with expand=true so the server logs it. */
  async expandChart(nodeId: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null) return;
    try {
      const hints = await this.client.hints(sessionId, nodeId, true);
      this.commit(setChartExpanded(applyHints(this.state, nodeId, hints), true));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Collapse hides the chart locally and logs the gesture server-side. */
  async collapseChart(nodeId: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null) return;
    this.commit(setChartExpanded(this.state, false));
    try {
      await this.client.collapse(sessionId, nodeId);
    } catch (error) {
      this.fail(error);
    }
  }

  private fail(error: unknown): void {
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : error instanceof Error
          ? error.message
          : String(error);
    this.commit(setError(this.state, message));
  }
}
