import { VttApi } from './api.js';
import { RaterApp } from './app.js';

// Page entry. Session and rater come from the query string so one static
// bundle serves any session: /?session=<id>&rater=<id>. An `api` param
// points at a remote engine when the page is not served by `vtt serve`.
function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get('session');
  const raterId = params.get('rater');
  const join = document.getElementById('join');

  if (!sessionId || !raterId) {
    if (join) join.hidden = false;
    return;
  }

  const api = new VttApi(params.get('api') ?? '', sessionId);
  const app = new RaterApp({ api, raterId });
  void app.start();
}

document.addEventListener('DOMContentLoaded', boot);
