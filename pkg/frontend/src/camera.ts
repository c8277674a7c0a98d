/** Webcam access and frame capture to base64 PNG payloads. */

export async function startCamera(video: HTMLVideoElement): Promise<MediaStream> {
  const stream = await navigator.mediaDevices.getUserMedia({
    video: true,
    audio: false,
  });
  video.srcObject = stream;
  video.muted = true;
  await video.play();
  return stream;
}

export function stopCamera(video: HTMLVideoElement): void {
  const stream = video.srcObject as MediaStream | null;
  stream?.getTracks().forEach((track) => track.stop());
  video.srcObject = null;
}

/** Draw the current video frame and return base64 PNG bytes (no data: prefix). */
export function captureFrame(
  video: HTMLVideoElement,
  canvas: HTMLCanvasElement,
): string {
  const width = video.videoWidth || 320;
  const height = video.videoHeight || 240;
  canvas.width = width;
  canvas.height = height;
  const context = canvas.getContext("2d");
  if (!context) throw new Error("2d canvas context unavailable");
  context.drawImage(video, 0, 0, width, height);
  const dataUrl = canvas.toDataURL("image/png");
  return dataUrl.slice(dataUrl.indexOf(",") + 1);
}
